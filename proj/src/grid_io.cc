/*
 * Copyright 2026 The georank Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "georank/errors.h"
#include "georank/io_util.h"
#include "georank/st_data.h"
#include "nlohmann/json.hpp"

namespace georank {
namespace {

using nlohmann::json;

struct Axis {
  const char* name;  // dimension name reported in errors, e.g. "T"
  const char* key;   // CSV key column, e.g. "t"
  std::size_t extent;
};

// Parses a keyed CSV table: `axes.size()` integer key columns followed by
// `width` value columns. Values land in `out` at the row-major key offset
// computed by `offset_of`, times `width`.
template <typename OffsetOf>
void ReadTable(const std::filesystem::path& path, const std::vector<Axis>& axes,
               const char* width_axis, std::size_t width, OffsetOf offset_of,
               std::vector<double>& out) {
  const std::string text = ReadTextFile(path);
  const std::string file = path.filename().string();
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(file + ": missing header row");
  const std::size_t columns = axes.size() + width;
  if (SplitCsvLine(line).size() != columns) {
    throw DataError(file + ": dimension mismatch on axis " + width_axis +
                    ": header has " +
                    std::to_string(SplitCsvLine(line).size() - axes.size()) +
                    " value columns, expected " + std::to_string(width));
  }
  std::size_t records = 1;
  for (const Axis& a : axes) records *= a.extent;
  out.assign(records * width, 0.0);
  std::vector<bool> seen(records, false);
  std::vector<std::set<std::size_t>> distinct(axes.size());

  std::size_t line_no = 1;
  std::vector<std::size_t> key(axes.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != columns) {
      throw DataError(file + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(columns) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      key[a] = ParseIndex(fields[a]);
      distinct[a].insert(key[a]);
      if (key[a] >= axes[a].extent) {
        throw DataError(file + ": dimension mismatch on axis " + axes[a].name +
                        ": index " + std::to_string(key[a]) +
                        " out of range (extent " +
                        std::to_string(axes[a].extent) + ")");
      }
    }
    const std::size_t record = offset_of(key);
    if (seen[record]) {
      throw DataError(file + ":" + std::to_string(line_no) +
                      ": duplicate record");
    }
    seen[record] = true;
    for (std::size_t k = 0; k < width; ++k) {
      const double v = ParseDouble(fields[axes.size() + k]);
      if (!std::isfinite(v)) {
        std::string where;
        for (std::size_t a = 0; a < axes.size(); ++a) {
          if (a) where += ",";
          where += std::string(axes[a].key) + "=" + std::to_string(key[a]);
        }
        throw DataError(file + ": non-finite value at (" + where + ")" +
                        (width > 1 ? " feature " + std::to_string(k) : ""));
      }
      out[record * width + k] = v;
    }
  }
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (distinct[a].size() != axes[a].extent) {
      throw DataError(file + ": dimension mismatch on axis " + axes[a].name +
                      ": found " + std::to_string(distinct[a].size()) +
                      " distinct indices, expected " +
                      std::to_string(axes[a].extent));
    }
  }
  for (std::size_t r = 0; r < records; ++r) {
    if (!seen[r]) throw DataError(file + ": missing records");
  }
}

json RangesToJson(const std::vector<FeatureRange>& ranges) {
  json out = json::array();
  for (const FeatureRange& r : ranges) {
    out.push_back({{"min", r.min}, {"max", r.max}});
  }
  return out;
}

std::vector<FeatureRange> RangesFromJson(const json& j, const char* name,
                                         std::size_t expected) {
  std::vector<FeatureRange> out;
  if (!j.contains(name)) return out;
  for (const json& r : j.at(name)) {
    out.push_back(FeatureRange{r.at("min").get<double>(),
                               r.at("max").get<double>()});
  }
  if (!out.empty() && out.size() != expected) {
    throw DataError(std::string("manifest normalization.") + name + " has " +
                    std::to_string(out.size()) + " entries, expected " +
                    std::to_string(expected));
  }
  return out;
}

std::string FeatureHeader(const std::string& keys, std::size_t width,
                          const char* prefix) {
  std::string header = keys;
  for (std::size_t k = 0; k < width; ++k) {
    header += "," + std::string(prefix) + std::to_string(k);
  }
  return header + "\n";
}

}  // namespace

std::filesystem::path SaveGrid(const StGrid& grid,
                               const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const std::size_t M = grid.rows(), N = grid.cols(), T = grid.periods();
  const std::size_t d_t = grid.temporal_features();
  const std::size_t d_s = grid.spatial_features();
  const std::size_t d_st = grid.spatiotemporal_features();

  std::string f_t = FeatureHeader("t", d_t, "ft");
  for (std::size_t t = 0; t < T; ++t) {
    f_t += std::to_string(t);
    for (std::size_t k = 0; k < d_t; ++k) {
      f_t += "," + FormatDouble(grid.temporal(t, k));
    }
    f_t += "\n";
  }
  std::string f_s = FeatureHeader("row,col", d_s, "fs");
  std::string f_st = FeatureHeader("row,col,t", d_st, "fst");
  std::string y = "row,col,t,y\n";
  for (std::size_t s = 0; s < grid.locations(); ++s) {
    const Cell c = ToCell(grid.dims(), s);
    const std::string rc = std::to_string(c.row) + "," + std::to_string(c.col);
    f_s += rc;
    for (std::size_t k = 0; k < d_s; ++k) {
      f_s += "," + FormatDouble(grid.spatial(s, k));
    }
    f_s += "\n";
    for (std::size_t t = 0; t < T; ++t) {
      const std::string key = rc + "," + std::to_string(t);
      f_st += key;
      for (std::size_t k = 0; k < d_st; ++k) {
        f_st += "," + FormatDouble(grid.spatiotemporal(s, t, k));
      }
      f_st += "\n";
      y += key + "," + FormatDouble(grid.risk(s, t)) + "\n";
    }
  }
  WriteTextFile(directory / "f_t.csv", f_t);
  WriteTextFile(directory / "f_s.csv", f_s);
  WriteTextFile(directory / "f_st.csv", f_st);
  WriteTextFile(directory / "y.csv", y);

  const Normalization& norm = grid.normalization();
  json manifest = {
      {"format", "georank-grid"},
      {"version", 1},
      {"M", M},
      {"N", N},
      {"T", T},
      {"d_t", d_t},
      {"d_s", d_s},
      {"d_st", d_st},
      {"files",
       {{"f_t", "f_t.csv"}, {"f_s", "f_s.csv"}, {"f_st", "f_st.csv"},
        {"y", "y.csv"}}},
      {"normalization",
       {{"f_t", RangesToJson(norm.temporal)},
        {"f_s", RangesToJson(norm.spatial)},
        {"f_st", RangesToJson(norm.spatiotemporal)}}}};
  const auto path = directory / "manifest.json";
  WriteTextFile(path, manifest.dump(2) + "\n");
  return path;
}

StGrid LoadGrid(const std::filesystem::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(ReadTextFile(manifest_path));
  } catch (const json::exception& e) {
    throw DataError("invalid manifest " + manifest_path.string() + ": " +
                    e.what());
  }
  GridShape shape;
  json files;
  try {
    shape.dims.rows = manifest.at("M").get<std::size_t>();
    shape.dims.cols = manifest.at("N").get<std::size_t>();
    shape.periods = manifest.at("T").get<std::size_t>();
    shape.temporal_features = manifest.at("d_t").get<std::size_t>();
    shape.spatial_features = manifest.at("d_s").get<std::size_t>();
    shape.spatiotemporal_features = manifest.at("d_st").get<std::size_t>();
    files = manifest.at("files");
  } catch (const json::exception& e) {
    throw DataError("manifest " + manifest_path.string() + ": " + e.what());
  }
  const auto base = manifest_path.parent_path();
  const auto file = [&](const char* key) {
    if (!files.contains(key)) {
      throw DataError(std::string("manifest lists no file for ") + key);
    }
    const auto path = base / files.at(key).get<std::string>();
    if (!std::filesystem::exists(path)) {
      throw DataError("missing file " + path.string());
    }
    return path;
  };
  const std::size_t M = shape.dims.rows, N = shape.dims.cols, T = shape.periods;
  const Axis axis_m{"M", "row", M}, axis_n{"N", "col", N},
      axis_t{"T", "t", T};

  std::vector<double> temporal, spatial, spatiotemporal, risk;
  ReadTable(file("f_t"), {axis_t}, "d_t", shape.temporal_features,
            [](const std::vector<std::size_t>& k) { return k[0]; }, temporal);
  ReadTable(file("f_s"), {axis_m, axis_n}, "d_s", shape.spatial_features,
            [N](const std::vector<std::size_t>& k) { return k[0] * N + k[1]; },
            spatial);
  // Stored [t][s]; the CSV is keyed (row, col, t).
  const std::size_t S = M * N;
  ReadTable(file("f_st"), {axis_m, axis_n, axis_t}, "d_st",
            shape.spatiotemporal_features,
            [N, S](const std::vector<std::size_t>& k) {
              return k[2] * S + k[0] * N + k[1];
            },
            spatiotemporal);
  ReadTable(file("y"), {axis_m, axis_n, axis_t}, "y", 1,
            [N, S](const std::vector<std::size_t>& k) {
              return k[2] * S + k[0] * N + k[1];
            },
            risk);

  Normalization norm;
  if (manifest.contains("normalization")) {
    const json& n = manifest.at("normalization");
    norm.temporal = RangesFromJson(n, "f_t", shape.temporal_features);
    norm.spatial = RangesFromJson(n, "f_s", shape.spatial_features);
    norm.spatiotemporal =
        RangesFromJson(n, "f_st", shape.spatiotemporal_features);
  }
  return StGrid(shape, std::move(temporal), std::move(spatial),
                std::move(spatiotemporal), std::move(risk), std::move(norm));
}

}  // namespace georank
