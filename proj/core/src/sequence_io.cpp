#include "smoothnet/sequence_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "smoothnet/errors.hpp"
#include "smoothnet/io_util.hpp"

namespace smoothnet {

using nlohmann::json;

std::string sequence_to_json(const PoseSequence& seq) {
  validate_sequence(seq);
  json doc;
  doc["format_version"] = 1;
  doc["fps"] = seq.fps;
  doc["num_joints"] = seq.num_joints;
  doc["dims"] = seq.dims;
  doc["layout"] = layout_name(seq.layout);
  doc["units"] = units_name(seq.units);
  json frames = json::array();
  for (std::size_t t = 0; t < seq.length(); ++t) {
    json row = json::array();
    const double* src = seq.frames.row_ptr(t);
    for (std::size_t c = 0; c < seq.channels(); ++c) row.push_back(src[c]);
    frames.push_back(std::move(row));
  }
  doc["frames"] = std::move(frames);
  return doc.dump();
}

PoseSequence sequence_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("sequence: ") + e.what());
  }
  try {
    if (doc.value("format_version", -1) != 1) {
      throw ParseError("sequence: unsupported format_version");
    }
    for (const char* key : {"fps", "num_joints", "dims", "layout", "units", "frames"}) {
      if (!doc.contains(key)) throw ParseError(std::string("sequence: missing '") + key + "'");
    }
    PoseSequence seq;
    seq.fps = doc.at("fps").get<double>();
    seq.num_joints = doc.at("num_joints").get<std::size_t>();
    seq.dims = doc.at("dims").get<std::size_t>();
    seq.layout = layout_from_name(doc.at("layout").get<std::string>());
    seq.units = units_from_name(doc.at("units").get<std::string>());
    const auto& frames = doc.at("frames");
    if (!frames.is_array() || frames.empty()) {
      throw ParseError("sequence: 'frames' must be a non-empty array");
    }
    const std::size_t length = frames.size();
    const std::size_t channels = frames.at(0).size();
    seq.frames = Matrix(length, channels);
    for (std::size_t t = 0; t < length; ++t) {
      const auto& row = frames.at(t);
      if (!row.is_array() || row.size() != channels) {
        throw ParseError("sequence: frame " + std::to_string(t) + " has " +
                         std::to_string(row.size()) + " values, expected " +
                         std::to_string(channels));
      }
      for (std::size_t c = 0; c < channels; ++c) {
        seq.frames(t, c) = row.at(c).get<double>();
      }
    }
    validate_sequence(seq);
    return seq;
  } catch (const json::exception& e) {
    throw ParseError(std::string("sequence: ") + e.what());
  }
}

void save_sequence(const std::string& path, const PoseSequence& seq) {
  write_file_atomic(path, sequence_to_json(seq));
}

PoseSequence load_sequence(const std::string& path) {
  return sequence_from_json(read_file(path));
}

void save_csv(const std::string& path, const PoseSequence& seq) {
  validate_sequence(seq);
  std::ostringstream out;
  out << "frame";
  for (std::size_t c = 0; c < seq.channels(); ++c) out << ",c" << c;
  out << "\n";
  char buf[40];
  for (std::size_t t = 0; t < seq.length(); ++t) {
    out << t;
    const double* src = seq.frames.row_ptr(t);
    for (std::size_t c = 0; c < seq.channels(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", src[c]);
      out << ',' << buf;
    }
    out << "\n";
  }
  write_file_atomic(path, out.str());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError("csv: line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

PoseSequence load_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: empty file " + path);
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "frame") {
    throw ParseError("csv: header must start with 'frame'");
  }
  const std::size_t channels = header.size() - 1;
  if (channels == 0) throw ParseError("csv: no channel columns");
  for (std::size_t c = 0; c < channels; ++c) {
    if (header[c + 1] != "c" + std::to_string(c)) {
      throw ParseError("csv: header column " + std::to_string(c + 1) + " is '" + header[c + 1] +
                       "', expected 'c" + std::to_string(c) + "'");
    }
  }
  std::vector<double> values;
  std::size_t rows = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != channels + 1) {
      throw ParseError("csv: line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(channels + 1));
    }
    const double frame = parse_double(fields[0], line_no);
    if (frame != static_cast<double>(rows)) {
      throw ParseError("csv: line " + std::to_string(line_no) + ": frame index " + fields[0] +
                       ", expected " + std::to_string(rows));
    }
    for (std::size_t c = 0; c < channels; ++c) {
      values.push_back(parse_double(fields[c + 1], line_no));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("csv: no data rows in " + path);
  Matrix frames(rows, channels);
  frames.data = std::move(values);
  PoseSequence seq = make_generic_sequence(std::move(frames), 30.0);
  validate_sequence(seq);
  return seq;
}

std::string manifest_to_json(const Manifest& manifest) {
  json doc;
  doc["format_version"] = 1;
  json pairs = json::array();
  for (const auto& p : manifest.pairs) {
    pairs.push_back({{"noisy", p.noisy}, {"clean", p.clean}, {"split", p.split}});
  }
  doc["pairs"] = std::move(pairs);
  doc["seed"] = manifest.seed;
  return doc.dump(2);
}

Manifest manifest_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  try {
    if (doc.value("format_version", -1) != 1) {
      throw ParseError("manifest: unsupported format_version");
    }
    if (!doc.contains("pairs")) throw ParseError("manifest: missing 'pairs'");
    Manifest manifest;
    manifest.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& jp : doc.at("pairs")) {
      ManifestPair p;
      p.noisy = jp.at("noisy").get<std::string>();
      p.clean = jp.at("clean").get<std::string>();
      p.split = jp.at("split").get<std::string>();
      if (p.split != "train" && p.split != "test") {
        throw ParseError("manifest: split must be 'train' or 'test', got '" + p.split + "'");
      }
      manifest.pairs.push_back(std::move(p));
    }
    return manifest;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

void save_manifest(const std::string& path, const Manifest& manifest) {
  write_file_atomic(path, manifest_to_json(manifest));
}

Manifest load_manifest(const std::string& path) {
  Manifest manifest = manifest_from_json(read_file(path));
  namespace fs = std::filesystem;
  const fs::path base = fs::path(path).parent_path();
  for (auto& p : manifest.pairs) {
    for (std::string* field : {&p.noisy, &p.clean}) {
      fs::path fp(*field);
      if (fp.is_relative()) *field = (base / fp).string();
    }
  }
  return manifest;
}

}  // namespace smoothnet
