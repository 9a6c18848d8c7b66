#pragma once

#include <string>
#include <vector>

#include "sublab/frames.hpp"

namespace sublab {

// ---------------------------------------------------------------------------
// Sectioned key = value files ([section] headers, '#' comments).

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

struct IniFile {
  std::vector<IniEntry> entries;
  const std::string* find(const std::string& section,
                          const std::string& key) const;
  std::vector<const IniEntry*> section_entries(
      const std::string& section) const;
};

IniFile parse_ini(const std::string& text);
IniFile load_ini(const std::string& path);

// ---------------------------------------------------------------------------
// Frame description files: [frame] section with kind, n, m, gamma/zeta and
// J matrices as row-major comma-separated lists (J1 = ...).

FrameInput parse_frame_input(const IniFile& ini);
FrameSpec load_frame_file(const std::string& path);
std::string frame_hash(const FrameSpec& frame);

// ---------------------------------------------------------------------------
// CSV tables (17 significant digits, '.' separator, no locale dependence).

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) {
    rows.push_back(std::move(cells));
  }
  std::string render() const;
};

std::string csv_cell(double value);

// ---------------------------------------------------------------------------
// Files.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Appends one line with a single write syscall (O_APPEND): concurrent
/// writers interleave whole lines.
void append_line_atomic(const std::string& path, const std::string& line);

}  // namespace sublab
