#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace cmclab {

/// Write a file atomically: stream into a sibling temp file, then rename.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace cmclab
