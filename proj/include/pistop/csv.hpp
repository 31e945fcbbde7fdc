#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pistop {

/// Formats a double with 17 significant digits ('.' decimal, no locale), so
/// identical runs emit byte-identical files and values round-trip exactly.
std::string format_full(double x);

/// Buffered CSV writer: header row, comma separators, LF line endings.
/// write_atomic lands the file via temp + rename.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(const std::vector<std::string>& cells);
    const std::string& content() const { return buffer_; }

    void write_atomic(const std::string& path) const;

private:
    std::string buffer_;
    std::size_t columns_;
};

/// Atomic whole-file write used by every artifact emitter.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace pistop
