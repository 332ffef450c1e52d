#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mtmeta/data_model.hpp"
#include "tsv.hpp"

namespace mtmeta {

using detail::fail_at;
using detail::format_double;
using detail::parse_double;
using detail::parse_index;
using detail::split_tabs;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open '" + path.string() + "'");
  return in;
}

// Skips '#' comment lines; returns false at EOF.
bool next_data_line(std::istream& in, std::string& line, std::size_t& lineno,
                    std::vector<std::string>* comments = nullptr) {
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (!line.empty() && line.front() == '#') {
      if (comments) comments->push_back(line);
      continue;
    }
    if (line.empty()) continue;
    return true;
  }
  return false;
}

void expect_header(std::istream& in, std::size_t& lineno, const std::string& origin,
                   const std::string& header, std::vector<std::string>* comments = nullptr) {
  std::string line;
  if (!next_data_line(in, line, lineno, comments)) {
    throw Error(ErrorKind::InvalidInput, origin + ": empty file");
  }
  if (line != header) {
    fail_at(ErrorKind::InvalidInput, origin, lineno, "expected header '" + header + "'");
  }
}

}  // namespace

std::vector<std::string> read_segments(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) {
    throw Error(ErrorKind::InvalidInput, "'" + path.string() + "' is empty");
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

EvalCorpus load_corpus(std::string language_pair, const std::filesystem::path& source,
                       const std::filesystem::path& reference,
                       const std::vector<std::pair<SystemId, std::filesystem::path>>& systems) {
  auto src = read_segments(source);
  auto ref = read_segments(reference);
  if (src.size() != ref.size()) {
    throw Error(ErrorKind::Alignment, "'" + source.string() + "' has " +
                                          std::to_string(src.size()) + " lines, reference has " +
                                          std::to_string(ref.size()));
  }
  std::map<SystemId, std::vector<std::string>> out;
  for (const auto& [id, path] : systems) {
    auto segs = read_segments(path);
    if (segs.size() != ref.size()) {
      throw Error(ErrorKind::Alignment, "'" + path.string() + "' has " +
                                            std::to_string(segs.size()) +
                                            " lines, reference has " + std::to_string(ref.size()));
    }
    if (!out.emplace(id, std::move(segs)).second) {
      throw Error(ErrorKind::DuplicateKey, "duplicate system id '" + id + "'");
    }
  }
  return EvalCorpus(std::move(language_pair), std::move(src), std::move(ref), std::move(out));
}

// ---------------------------------------------------------------------------
// DA TSV

namespace {
constexpr const char* kDaHeader = "system\tsegment\tannotator\traw\tz";
constexpr const char* kMatrixHeader = "metric\tsystem\tlevel\tsegment\tscore";
}  // namespace

HumanAssessment read_assessment(std::istream& in, const std::string& origin) {
  std::size_t lineno = 0;
  expect_header(in, lineno, origin, kDaHeader);

  std::vector<DaRecord> records;
  std::size_t with_z = 0;
  std::string line;
  while (next_data_line(in, line, lineno)) {
    auto cols = split_tabs(line);
    if (cols.size() != 5) fail_at(ErrorKind::InvalidInput, origin, lineno, "expected 5 columns");
    DaRecord r;
    r.system = std::string(cols[0]);
    if (r.system.empty()) fail_at(ErrorKind::InvalidInput, origin, lineno, "empty system id");
    auto seg = parse_index(cols[1]);
    if (!seg || *seg == 0) {
      fail_at(ErrorKind::InvalidInput, origin, lineno, "segment must be a positive integer");
    }
    r.segment = *seg - 1;
    r.annotator = std::string(cols[2]);
    if (!cols[3].empty()) {
      r.raw = parse_double(cols[3]);
      if (!r.raw) fail_at(ErrorKind::InvalidInput, origin, lineno, "non-numeric raw score");
      if (!(*r.raw >= 0.0 && *r.raw <= 100.0)) {
        fail_at(ErrorKind::Range, origin, lineno, "raw score outside [0,100]");
      }
    }
    if (!cols[4].empty()) {
      auto z = parse_double(cols[4]);
      if (!z) fail_at(ErrorKind::InvalidInput, origin, lineno, "non-numeric z-score");
      r.z = *z;
      ++with_z;
    } else if (!r.raw) {
      fail_at(ErrorKind::InvalidInput, origin, lineno, "row has neither raw score nor z-score");
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw Error(ErrorKind::InvalidInput, origin + ": no DA records");
  if (with_z == records.size()) return HumanAssessment(std::move(records));
  if (with_z == 0) return HumanAssessment::from_raw(std::move(records));
  throw Error(ErrorKind::InvalidInput,
              origin + ": z column must be filled for all rows or for none");
}

HumanAssessment load_assessment(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_assessment(in, path.string());
}

void write_assessment(std::ostream& out, const HumanAssessment& assessment) {
  out << kDaHeader << '\n';
  for (const auto& r : assessment.records()) {
    out << r.system << '\t' << (r.segment + 1) << '\t' << r.annotator << '\t'
        << (r.raw ? format_double(*r.raw) : std::string{}) << '\t' << format_double(r.z)
        << '\n';
  }
}

// ---------------------------------------------------------------------------
// Score matrix TSV

ScoreMatrixLoad read_score_matrix(std::istream& in, const std::string& origin) {
  std::size_t lineno = 0;
  std::vector<std::string> comments;
  expect_header(in, lineno, origin, kMatrixHeader, &comments);

  ScoreMatrix matrix;
  auto apply_directives = [&](std::size_t at) {
    for (const auto& c : comments) {
      auto cols = split_tabs(c);
      if (cols.size() == 3 && cols[0] == "#orientation") {
        if (cols[2] == "lower") {
          matrix.set_orientation(std::string(cols[1]), Orientation::LowerIsBetter);
        } else if (cols[2] == "higher") {
          matrix.set_orientation(std::string(cols[1]), Orientation::HigherIsBetter);
        } else {
          fail_at(ErrorKind::InvalidInput, origin, at, "orientation must be 'lower' or 'higher'");
        }
      }
    }
    comments.clear();
  };
  apply_directives(lineno);

  std::map<std::pair<MetricId, SystemId>, std::map<std::size_t, double>> segments;
  std::string line;
  while (next_data_line(in, line, lineno, &comments)) {
    apply_directives(lineno);
    auto cols = split_tabs(line);
    if (cols.size() != 5) fail_at(ErrorKind::InvalidInput, origin, lineno, "expected 5 columns");
    const std::string metric(cols[0]);
    const std::string system(cols[1]);
    if (metric.empty() || system.empty()) {
      fail_at(ErrorKind::InvalidInput, origin, lineno, "empty metric or system id");
    }
    auto score = parse_double(cols[4]);
    if (!score) fail_at(ErrorKind::InvalidInput, origin, lineno, "non-numeric score");
    if (cols[2] == "sys") {
      if (!cols[3].empty()) {
        fail_at(ErrorKind::InvalidInput, origin, lineno, "segment must be empty for sys rows");
      }
      if (matrix.find_system_score(metric, system)) {
        fail_at(ErrorKind::DuplicateKey, origin, lineno,
                "duplicate row for (" + metric + ", " + system + ", sys)");
      }
      matrix.set_system_score(metric, system, *score);
    } else if (cols[2] == "seg") {
      auto seg = parse_index(cols[3]);
      if (!seg || *seg == 0) {
        fail_at(ErrorKind::InvalidInput, origin, lineno, "segment must be a positive integer");
      }
      auto& slot = segments[{metric, system}];
      if (!slot.emplace(*seg - 1, *score).second) {
        fail_at(ErrorKind::DuplicateKey, origin, lineno,
                "duplicate row for (" + metric + ", " + system + ", seg " +
                    std::string(cols[3]) + ")");
      }
    } else {
      fail_at(ErrorKind::InvalidInput, origin, lineno, "level must be 'sys' or 'seg'");
    }
  }
  apply_directives(lineno);

  std::map<MetricId, std::size_t> seg_lengths;
  for (auto& [key, by_index] : segments) {
    if (!matrix.find_system_score(key.first, key.second)) {
      throw Error(ErrorKind::MissingData, origin + ": segment rows for (" + key.first + ", " +
                                              key.second + ") without a sys row");
    }
    if (by_index.rbegin()->first + 1 != by_index.size()) {
      throw Error(ErrorKind::MissingData, origin + ": segment rows for (" + key.first + ", " +
                                              key.second + ") are not contiguous from 1");
    }
    auto [it, fresh] = seg_lengths.emplace(key.first, by_index.size());
    if (!fresh && it->second != by_index.size()) {
      throw Error(ErrorKind::Alignment,
                  origin + ": segment vectors of " + key.first + " differ in length");
    }
    std::vector<double> v;
    v.reserve(by_index.size());
    for (const auto& [_, s] : by_index) v.push_back(s);
    matrix.set_segment_scores(key.first, key.second, std::move(v));
  }

  ScoreMatrixLoad result{std::move(matrix), {}};
  std::set<SystemId> all;
  for (const auto& [key, _] : result.matrix.system_level()) all.insert(key.second);
  for (const auto& m : result.matrix.metrics()) {
    auto sys = result.matrix.systems(m);
    if (sys.size() != all.size()) {
      result.warnings.push_back(m + ": scores " + std::to_string(sys.size()) + " of " +
                                std::to_string(all.size()) + " systems");
    }
  }
  return result;
}

ScoreMatrixLoad load_score_matrix(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_score_matrix(in, path.string());
}

void write_score_matrix(std::ostream& out, const ScoreMatrix& matrix) {
  for (const auto& [metric, o] : matrix.orientations()) {
    out << "#orientation\t" << metric << '\t' << to_string(o) << '\n';
  }
  out << kMatrixHeader << '\n';
  for (const auto& [key, score] : matrix.system_level()) {
    out << key.first << '\t' << key.second << "\tsys\t\t" << format_double(score) << '\n';
  }
  for (const auto& [key, scores] : matrix.segment_level()) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      out << key.first << '\t' << key.second << "\tseg\t" << (i + 1) << '\t'
          << format_double(scores[i]) << '\n';
    }
  }
}

}  // namespace mtmeta
