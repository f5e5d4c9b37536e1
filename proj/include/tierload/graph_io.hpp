// Copyright 2026 The tierload Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>

#include "tierload/features.hpp"
#include "tierload/graph.hpp"

namespace tierload {

// On-disk formats. All integers little-endian.
//
//   graph (.gcsc):    "GCSC" | u32 version=1 | u64 num_nodes | u64 num_edges
//                     | (num_nodes+1) x u64 indptr | num_edges x u64 indices
//   features (.gfea): "GFEA" | u32 version=1 | u64 num_nodes | u32 dim
//                     | u32 dtype (0 = float32) | row-major payload
//
// indptr/indices hold in-neighbor lists: column v lists the sources of the
// edges that end at v.
//
// Loaders throw BadMagicError, VersionMismatchError, TruncatedFileError or
// CorruptDataError (all FormatError); IoError when the file cannot be opened.
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kDtypeFloat32 = 0;

void save_graph(const std::filesystem::path& path, const GraphCsc& g);
GraphCsc load_graph(const std::filesystem::path& path);

// Procedural stores are materialized row by row while writing.
void save_features(const std::filesystem::path& path, const FeatureStore& features);
FeatureStore load_features(const std::filesystem::path& path, std::uint32_t page_bytes = 4096);

}  // namespace tierload
