// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The Mondegreen Authors

#pragma once

namespace mondegreen {

inline constexpr const char* kVersion = "0.1.0";

// Snapshot files carry this in their "#version" header line; loaders reject
// anything else.
inline constexpr int kSnapshotFormatVersion = 1;

}  // namespace mondegreen
