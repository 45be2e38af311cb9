#include "centerfield/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "centerfield/errors.hpp"

namespace centerfield {

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                   std::chars_format::general, 17);
    if (ec != std::errc()) raise(errc::numerical_failure, "double formatting failed");
    return std::string(buffer, ptr);
}

std::string format_vector(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) raise(errc::invalid_argument, "cannot open " + path.string() + " for writing");
    stream.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!stream) raise(errc::invalid_argument, "write to " + path.string() + " failed");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) raise(errc::invalid_argument, "cannot open " + path.string());
    std::ostringstream out;
    out << stream.rdbuf();
    return out.str();
}

} // namespace centerfield
