// SPDX-License-Identifier: Apache-2.0

#ifndef EIGENROM_CSV_HPP
#define EIGENROM_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

namespace eigenrom
{

// Shortest form with 17 significant digits, '.' decimal point, any locale.
std::string format_real(double value);

// Comma-separated file with LF line endings.
class CsvWriter
{
public:
  CsvWriter(const std::string &path, const std::vector<std::string> &header);

  CsvWriter &operator<<(double value);
  CsvWriter &operator<<(int value);
  CsvWriter &operator<<(const std::string &value);
  void end_row();

private:
  void separator();

  std::ofstream out_;
  bool row_started_ = false;
};

// Parsed CSV: header plus string cells.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string &name) const;
};

CsvTable read_csv(const std::string &path);

}  // namespace eigenrom

#endif  // EIGENROM_CSV_HPP
