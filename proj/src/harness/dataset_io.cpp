// Apache License, Version 2.0, refer to LICENSE.txt

#include "dpmix/harness/dataset_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <vector>

#include "dpmix/error.hpp"
#include "dpmix/prior_samplers.hpp"

namespace dpmix::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_int(std::string_view s, long& out) {
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

Dataset parse_dataset(std::istream& in, const std::string& source) {
  Dataset data;
  bool have_header = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!have_header) {
      const auto eq = line.find('=');
      long j = 0;
      if (eq == std::string_view::npos || trim(line.substr(0, eq)) != "trials" ||
          !parse_int(trim(line.substr(eq + 1)), j))
        fail(ErrorCategory::parse, where(source, line_no) + "expected header 'trials=J', got '" +
                                       std::string(line) + "'");
      if (j < 1 || j > 1'000'000)
        fail(ErrorCategory::parse, where(source, line_no) + "trials must be a positive count");
      data.trials = static_cast<int>(j);
      have_header = true;
      continue;
    }
    long y = 0;
    if (!parse_int(line, y))
      fail(ErrorCategory::parse,
           where(source, line_no) + "malformed row '" + std::string(line) + "'");
    if (y < 0 || y > data.trials)
      fail(ErrorCategory::range, where(source, line_no) + "count " + std::to_string(y) +
                                     " outside [0, " + std::to_string(data.trials) + "]");
    data.y.push_back(static_cast<int>(y));
  }
  if (in.bad()) fail(ErrorCategory::io, source + ": read failed");
  if (!have_header) fail(ErrorCategory::empty_input, source + ": no header and no observations");
  if (data.y.empty()) fail(ErrorCategory::empty_input, source + ": no observations");
  return data;
}

Dataset load_dataset(const std::string& path) {
  if (path.empty()) fail(ErrorCategory::invalid_argument, "no dataset path given");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    fail(ErrorCategory::missing_input, "dataset file not found: " + path);
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::io, "cannot open dataset file: " + path);
  return parse_dataset(in, path);
}

void write_dataset(const std::string& path, const Dataset& data, const std::string& comment) {
  data.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCategory::io, "cannot write dataset file: " + path);
  if (!comment.empty()) {
    std::size_t pos = 0;
    while (pos <= comment.size()) {
      const auto nl = comment.find('\n', pos);
      out << "# " << comment.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos)
          << '\n';
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
  }
  out << "trials=" << data.trials << '\n';
  for (int y : data.y) out << y << '\n';
  if (!out) fail(ErrorCategory::io, "write failed: " + path);
}

std::uint64_t dataset_fingerprint(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::int64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(data.trials);
  mix(static_cast<std::int64_t>(data.y.size()));
  for (int y : data.y) mix(y);
  return h;
}

Dataset simulate_dataset(int n, const ModelSpec& model, RngStream& rng) {
  model.validate();
  if (n < 1) fail(ErrorCategory::invalid_argument, "simulate_dataset needs n >= 1");
  const OoaLabels s = polya_urn_sample(n, model.alpha, rng);
  std::vector<double> atoms(static_cast<std::size_t>(s.cluster_count()));
  for (double& a : atoms) a = rng.beta(model.base_a, model.base_b);
  Dataset data{model.trials, std::vector<int>(static_cast<std::size_t>(n))};
  for (int i = 0; i < n; ++i)
    data.y[i] = rng.binomial(model.trials, atoms[static_cast<std::size_t>(s[i]) - 1]);
  return data;
}

}  // namespace dpmix::harness
