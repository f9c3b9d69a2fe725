#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace confined {

inline constexpr const char* kCsvSchemaComment = "# confined-diffusion v0.1.0";

/// Minimal CSV writer with the versioned schema comment line. Formats
/// reals with %.12g so replays are byte-identical.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : f_(std::fopen(path.c_str(), "w")) {
        if (!f_) throw std::runtime_error("cannot open for writing: " + path);
        std::fprintf(f_, "%s\n", kCsvSchemaComment);
    }
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void header(const std::string& h) { std::fprintf(f_, "%s\n", h.c_str()); }

    template <class... Ts>
    void row(Ts... vals) {
        bool first = true;
        (write_one(vals, first), ...);
        std::fprintf(f_, "\n");
    }

  private:
    void write_one(double v, bool& first) {
        std::fprintf(f_, first ? "%.12g" : ",%.12g", v);
        first = false;
    }
    void write_one(long v, bool& first) {
        std::fprintf(f_, first ? "%ld" : ",%ld", v);
        first = false;
    }
    void write_one(int v, bool& first) { write_one(static_cast<long>(v), first); }
    void write_one(const char* v, bool& first) {
        std::fprintf(f_, first ? "%s" : ",%s", v);
        first = false;
    }
    std::FILE* f_;
};

}  // namespace confined
