// SPDX-License-Identifier: Apache-2.0

#include "eigenrom/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include "eigenrom/error.hpp"

namespace eigenrom
{

std::string format_real(double value)
{
  if (std::isnan(value))
  {
    return "nan";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::string &path, const std::vector<std::string> &header)
    : out_(path, std::ios::binary | std::ios::trunc)
{
  EIGENROM_VERIFY(out_.good(), InvalidInput, "cannot open ", path, " for writing");
  for (const auto &h : header)
  {
    *this << h;
  }
  end_row();
}

void CsvWriter::separator()
{
  if (row_started_)
  {
    out_ << ',';
  }
  row_started_ = true;
}

CsvWriter &CsvWriter::operator<<(double value)
{
  separator();
  out_ << format_real(value);
  return *this;
}

CsvWriter &CsvWriter::operator<<(int value)
{
  separator();
  out_ << value;
  return *this;
}

CsvWriter &CsvWriter::operator<<(const std::string &value)
{
  separator();
  out_ << value;
  return *this;
}

void CsvWriter::end_row()
{
  out_ << '\n';
  row_started_ = false;
}

int CsvTable::column(const std::string &name) const
{
  for (size_t i = 0; i < header.size(); i++)
  {
    if (header[i] == name)
    {
      return static_cast<int>(i);
    }
  }
  return -1;
}

CsvTable read_csv(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  EIGENROM_VERIFY(in.good(), InvalidInput, "cannot open ", path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line))
  {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
      cells.push_back(cell);
    }
    if (first)
    {
      table.header = std::move(cells);
      first = false;
    }
    else
    {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace eigenrom
