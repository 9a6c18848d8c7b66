#include "sublab/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <set>
#include <sstream>

#include "sublab/numerics.hpp"

namespace sublab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::string* IniFile::find(const std::string& section,
                                 const std::string& key) const {
  for (const auto& e : entries)
    if (e.section == section && e.key == key) return &e.value;
  return nullptr;
}

std::vector<const IniEntry*> IniFile::section_entries(
    const std::string& section) const {
  std::vector<const IniEntry*> out;
  for (const auto& e : entries)
    if (e.section == section) out.push_back(&e);
  return out;
}

IniFile parse_ini(const std::string& text) {
  IniFile out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        fail(ErrorCode::ParseError,
             "line " + std::to_string(lineno) + ": unterminated section");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + " column " +
               std::to_string(t.size()) + ": expected key = value");
    IniEntry e;
    e.section = section;
    e.key = trim(t.substr(0, eq));
    e.value = trim(t.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty())
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert({section, e.key}).second)
      fail(ErrorCode::ParseError,
           "line " + std::to_string(lineno) + ": duplicate key '" + e.key +
               "' in section [" + section + "]");
    out.entries.push_back(std::move(e));
  }
  return out;
}

IniFile load_ini(const std::string& path) {
  return parse_ini(read_text_file(path));
}

FrameInput parse_frame_input(const IniFile& ini) {
  FrameInput input;
  const std::string* kind = ini.find("frame", "kind");
  if (!kind) fail(ErrorCode::ParseError, "frame file must set [frame] kind");
  input.kind = frame_kind_from_string(*kind);

  auto get_int = [&](const char* key, int def, bool required) {
    const std::string* v = ini.find("frame", key);
    if (!v) {
      if (required)
        fail(ErrorCode::ParseError,
             std::string("frame file must set ") + key);
      return def;
    }
    return std::stoi(*v);
  };
  auto get_double = [&](const char* key, double def) {
    const std::string* v = ini.find("frame", key);
    return v ? std::stod(*v) : def;
  };

  input.n = get_int("n", 0, true);
  input.m = get_int("m", input.kind == FrameKind::HeisenbergGreiner ? 1 : 0,
                    input.kind != FrameKind::HeisenbergGreiner);
  input.gamma = get_double("gamma", 0.0);
  input.zeta = get_double("zeta", 1.0);

  if (input.kind == FrameKind::Metivier) {
    const int d = 2 * input.n;
    for (int k = 1; k <= input.m; ++k) {
      const std::string* row = ini.find("frame", "J" + std::to_string(k));
      if (!row)
        fail(ErrorCode::ParseError,
             "frame file missing J" + std::to_string(k));
      std::vector<double> vals;
      std::istringstream vs(*row);
      std::string cell;
      while (std::getline(vs, cell, ',')) vals.push_back(std::stod(trim(cell)));
      if (static_cast<int>(vals.size()) != d * d)
        fail(ErrorCode::BadDimension,
             "J" + std::to_string(k) + " must have " + std::to_string(d * d) +
                 " entries (row-major)");
      Eigen::MatrixXd J(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) J(r, c) = vals[r * d + c];
      input.J.push_back(J);
    }
  }
  return input;
}

FrameSpec load_frame_file(const std::string& path) {
  return build_frame(parse_frame_input(load_ini(path)));
}

std::string frame_hash(const FrameSpec& frame) {
  return fnv1a_hex(frame.describe());
}

std::string csv_cell(double value) { return format_double(value); }

std::string CsvTable::render() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) os << ",";
    os << header[i];
  }
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << row[i];
    }
    os << "\n";
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(ErrorCode::IoError, "short write to '" + path + "'");
}

void append_line_atomic(const std::string& path, const std::string& line) {
  std::string buf = line;
  buf.push_back('\n');
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) fail(ErrorCode::IoError, "cannot open ledger '" + path + "'");
  const ssize_t written = ::write(fd, buf.data(), buf.size());
  ::close(fd);
  if (written != static_cast<ssize_t>(buf.size()))
    fail(ErrorCode::IoError, "short ledger append to '" + path + "'");
}

}  // namespace sublab
