// biphoton/io.hpp
// Disk formats: CSV at full double precision (17 significant digits, LF line
// endings, header row) and JSON with stable key order. Outputs are meant to
// be diffed byte-for-byte between runs, so every formatting choice here is
// deterministic.
#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biphoton/errors.hpp"
#include "biphoton/trajectory.hpp"

namespace biphoton {

// Insertion-ordered JSON keeps summaries reproducible and readable.
using ordered_json = nlohmann::ordered_json;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  // Binary mode so LF stays LF on every platform.
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw io_error("short write: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failed: " + path);
  return body;
}

// Generic numeric table; header size must match every row.
inline std::string table_csv(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out += ',';
    out += header[k];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw invalid_parameter_error("table_csv: row width differs from header");
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += fmt17(row[k]);
    }
    out += '\n';
  }
  return out;
}

inline std::string trajectory_csv(const Trajectory& traj) {
  traj.validate();
  std::string out = "t";
  for (const auto& n : traj.names) {
    out += ',';
    out += n;
  }
  out += '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out += fmt17(traj.times[i]);
    for (const auto& col : traj.cols) {
      out += ',';
      out += fmt17(col[i]);
    }
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::string& path, const Trajectory& traj) {
  write_text_file(path, trajectory_csv(traj));
}

inline void write_json(const std::string& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace biphoton
