/*
 Copyright 2026 The tankds Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "tankds/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "format.hpp"
#include "tankds/errors.hpp"

namespace tankds {
namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, const std::string& source, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    throw ParseError(source + ":" + std::to_string(line) + ": cannot parse '" +
                     std::string(field) + "' as a number");
  return v;
}

}  // namespace

Demonstration read_demonstration_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_commas(line);
  if (header.empty() || trim(header[0]) != "t")
    throw ParseError(source + ": header must start with 't'");
  Eigen::Index n = 0;
  while (1 + n < static_cast<Eigen::Index>(header.size()) &&
         trim(header[1 + n]) == "x" + std::to_string(n + 1))
    ++n;
  if (n == 0) throw ParseError(source + ": header has no x1 column");
  const auto columns = static_cast<Eigen::Index>(header.size());
  bool has_vel = false;
  if (columns == 1 + 2 * n) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (trim(header[1 + n + i]) != "v" + std::to_string(i + 1))
        throw ParseError(source + ": expected velocity column v" + std::to_string(i + 1));
    has_vel = true;
  } else if (columns != 1 + n) {
    throw ParseError(source + ": header must be t,x1..xn[,v1..vn]");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (static_cast<Eigen::Index>(fields.size()) != columns)
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(columns) + " fields, got " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_number(f, source, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": no samples");

  const auto T = static_cast<Eigen::Index>(rows.size());
  Demonstration demo;
  demo.times.resize(T);
  demo.positions.resize(T, n);
  if (has_vel) demo.velocities = Eigen::MatrixXd(T, n);
  for (Eigen::Index t = 0; t < T; ++t) {
    demo.times(t) = rows[t][0];
    for (Eigen::Index i = 0; i < n; ++i) {
      demo.positions(t, i) = rows[t][1 + i];
      if (has_vel) (*demo.velocities)(t, i) = rows[t][1 + n + i];
    }
  }
  try {
    demo.validate();
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  }
  return demo;
}

Demonstration read_demonstration_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_demonstration_csv(in, path.string());
}

void write_demonstration_csv(const Demonstration& demo, std::ostream& out) {
  const Eigen::Index n = demo.dim();
  out << 't';
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  if (demo.velocities)
    for (Eigen::Index i = 1; i <= n; ++i) out << ",v" << i;
  out << '\n';
  for (Eigen::Index t = 0; t < demo.size(); ++t) {
    out << detail::format_double(demo.times(t));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << detail::format_double(demo.positions(t, i));
    if (demo.velocities)
      for (Eigen::Index i = 0; i < n; ++i)
        out << ',' << detail::format_double((*demo.velocities)(t, i));
    out << '\n';
  }
}

Motion read_motion(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "corpus.json";
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open " + manifest_path.string());

  Motion motion;
  try {
    const auto doc = nlohmann::json::parse(in);
    motion.name = doc.at("name").get<std::string>();
    motion.dim = doc.at("dim").get<Eigen::Index>();
    const auto goal = doc.at("goal").get<std::vector<double>>();
    motion.goal = Eigen::Map<const Eigen::VectorXd>(goal.data(), static_cast<Eigen::Index>(goal.size()));
    motion.files = doc.at("files").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  if (motion.dim < 1) throw ParseError(manifest_path.string() + ": dim must be positive");
  if (motion.goal.size() != motion.dim)
    throw ParseError(manifest_path.string() + ": goal has " + std::to_string(motion.goal.size()) +
                     " entries, dim is " + std::to_string(motion.dim));
  if (motion.files.empty()) throw ParseError(manifest_path.string() + ": no files listed");

  for (const auto& file : motion.files) {
    Demonstration demo = read_demonstration_csv(dir / file);
    if (demo.dim() != motion.dim)
      throw ParseError((dir / file).string() + ": dimension " + std::to_string(demo.dim()) +
                       " differs from manifest dim " + std::to_string(motion.dim));
    motion.demos.push_back(std::move(demo));
  }
  return motion;
}

void write_motion(const Motion& motion, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files = motion.files;
  if (files.size() != motion.demos.size()) {
    files.clear();
    for (std::size_t i = 0; i < motion.demos.size(); ++i)
      files.push_back("demo_" + std::to_string(i + 1) + ".csv");
  }
  for (std::size_t i = 0; i < motion.demos.size(); ++i) {
    std::ofstream out(dir / files[i]);
    if (!out) throw Error("cannot write " + (dir / files[i]).string());
    write_demonstration_csv(motion.demos[i], out);
  }
  const nlohmann::json manifest = {
      {"name", motion.name},
      {"dim", motion.dim},
      {"goal", std::vector<double>(motion.goal.data(), motion.goal.data() + motion.goal.size())},
      {"files", files}};
  std::ofstream out(dir / "corpus.json");
  if (!out) throw Error("cannot write " + (dir / "corpus.json").string());
  out << manifest.dump(2) << '\n';
}

std::vector<std::filesystem::path> list_motion_dirs(const std::filesystem::path& root) {
  if (std::filesystem::exists(root / "corpus.json")) return {root};
  if (!std::filesystem::is_directory(root))
    throw ParseError(root.string() + " is not a directory");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "corpus.json"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace tankds
