#include "common.hpp"

#include <charconv>
#include <cmath>

#include <unistd.h>

namespace morkit::cli
{

namespace
{
double to_double(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

std::size_t to_size(const std::string& s)
{
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("not a count: '" + s + "'");
    return v;
}
}  // namespace

void Manifest::write(const std::filesystem::path& dir, int exit_code) const
{
    nlohmann::json j;
    j["command"] = command;
    j["argv"] = argv;
    j["config"] = config;
    j["results"] = results;
    j["timings"] = timings;
    j["outputs"] = outputs;
    j["notes"] = notes;
    j["exit_code"] = exit_code;
    auto out = open_output(dir / (command + ".manifest.json"));
    out << j.dump(2) << '\n';
}

double parse_fraction(const std::string& s)
{
    const auto slash = s.find('/');
    const double v = slash == std::string::npos ? to_double(s) : to_double(s.substr(0, slash)) / to_double(s.substr(slash + 1));
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("expected a positive number, got '" + s + "'");
    return v;
}

std::pair<std::size_t, std::size_t> parse_blocks(const std::string& s)
{
    const auto x = s.find('x');
    if (x == std::string::npos) throw UsageError("--blocks expects MxN, got '" + s + "'");
    const auto m = to_size(s.substr(0, x));
    const auto n = to_size(s.substr(x + 1));
    if (m == 0 || n == 0) throw UsageError("--blocks needs positive counts");
    return {m, n};
}

std::pair<double, double> parse_range(const std::string& s)
{
    const auto c = s.find(':');
    if (c == std::string::npos) throw UsageError("expected a range a:b, got '" + s + "'");
    const double a = to_double(s.substr(0, c));
    const double b = to_double(s.substr(c + 1));
    if (!(a <= b)) throw UsageError("empty range '" + s + "'");
    return {a, b};
}

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out.precision(17);
    return out;
}

std::filesystem::path sibling_executable(const std::string& name)
{
    std::error_code ec;
    const auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
    if (ec) return name;
    return self.parent_path() / name;
}

}  // namespace morkit::cli
