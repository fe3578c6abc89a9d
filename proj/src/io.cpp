#include "cogarch/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace cogarch {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("cannot parse number '" + s + "' at line " +
                             std::to_string(line_no),
                         line_no);
    }
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string path_to_csv(const SimulatedPath& path) {
    std::ostringstream os;
    os << "time,G,V";
    for (std::size_t k = 1; k <= path.spec.q; ++k) os << ",Y" << k;
    os << ",is_jump\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        os << format_double(path.times[i]) << ',' << format_double(path.G[i]) << ','
           << format_double(path.V[i]);
        for (std::size_t k = 0; k < path.spec.q; ++k)
            os << ',' << format_double(path.Y[i][k]);
        os << ',' << (path.is_jump[i] ? 1 : 0) << '\n';
    }
    return os.str();
}

void write_file(const std::string& filename, const std::string& content) {
    std::ofstream f(filename, std::ios::binary);
    if (!f) throw DomainError("cannot open file for writing: " + filename);
    f << content;
    if (!f) throw DomainError("failed writing file: " + filename);
}

std::string read_file(const std::string& filename) {
    std::ifstream f(filename, std::ios::binary);
    if (!f) throw DomainError("cannot open file: " + filename);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::string study_cells_to_csv(const ConvergenceReport& report) {
    std::ostringstream os;
    os << "mesh,seed,distance\n";
    for (const StudyCell& c : report.cells)
        os << format_double(c.mesh) << ',' << c.seed << ',' << format_double(c.distance)
           << '\n';
    return os.str();
}

std::string observed_to_csv(const ObservedSeries& series) {
    std::ostringstream os;
    os << "time,dG\n";
    for (std::size_t i = 0; i < series.count(); ++i)
        os << format_double(series.times[i + 1]) << ','
           << format_double(series.increments[i]) << '\n';
    return os.str();
}

ObservedSeries read_observed_csv(const std::string& content) {
    std::istringstream is(content);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(is, line)) throw ParseError("empty input", 1);
    ++line_no;
    const std::vector<std::string> header = split(trim(line), ',');
    bool levels;
    if (header.size() == 2 && trim(header[0]) == "time" && trim(header[1]) == "dG") {
        levels = false;
    } else if (header.size() == 2 && trim(header[0]) == "time" &&
               trim(header[1]) == "level") {
        levels = true;
    } else {
        throw ParseError("expected header 'time,dG' or 'time,level' at line 1", 1);
    }

    std::vector<double> times, values;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::vector<std::string> cols = split(t, ',');
        if (cols.size() != 2)
            throw ParseError("expected 2 columns at line " + std::to_string(line_no),
                             line_no);
        times.push_back(parse_double(trim(cols[0]), line_no));
        values.push_back(parse_double(trim(cols[1]), line_no));
    }
    if (times.empty()) throw ParseError("no data rows", line_no == 0 ? 1 : line_no);

    try {
        if (levels) return ObservedSeries::from_levels(times, values);
        // Increment rows cover (prev_time, time]; the origin is t = 0.
        std::vector<double> full_times;
        full_times.reserve(times.size() + 1);
        full_times.push_back(0.0);
        full_times.insert(full_times.end(), times.begin(), times.end());
        return ObservedSeries(std::move(full_times), std::move(values));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid series: ") + e.what(), line_no);
    } catch (const std::runtime_error& e) {
        throw ParseError(std::string("invalid series: ") + e.what(), line_no);
    }
}

std::string fnv1a_hex(const std::string& content) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : content) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cogarch
