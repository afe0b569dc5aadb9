#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace radbound::csv {

/// Shortest round-trip decimal form of a double; byte-stable for identical
/// inputs.
std::string format_double(double value);

/// CSV with a fixed header and stable column order. Writes are buffered and
/// flushed on close so emitted files are byte-deterministic.
class Writer {
  public:
    Writer(const std::string& path, const std::vector<std::string>& header);
    ~Writer();

    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void row(const std::vector<std::string>& cells);
    void close();
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_;
};

std::string cell(double value);
std::string cell(std::size_t value);
std::string cell(int value);
std::string cell(bool value);

}  // namespace radbound::csv
