#include "optprob/grid_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace optprob {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int line, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) fail(line, std::string("trailing characters after ") + what);
        if (!std::isfinite(v)) fail(line, std::string(what) + " is not finite");
        return v;
    } catch (const std::invalid_argument&) {
        fail(line, std::string("cannot parse ") + what + " from '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(line, std::string(what) + " out of double range");
    }
}

int parse_count(const std::string& s, int line, const char* what) {
    double v = parse_double(s, line, what);
    if (v != std::floor(v) || v < 1 || v > 1e9)
        fail(line, std::string(what) + " must be a positive integer");
    return static_cast<int>(v);
}

}  // namespace

PhaseSpaceGrid read_grid_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail(1, "missing header");
    auto head = split_csv(line);
    if (head.size() != 7)
        fail(1, "header must have 7 fields: q_min,q_max,n_q,p_min,p_max,n_p,purity");

    PhaseSpaceGrid g;
    g.q_min = parse_double(head[0], 1, "q_min");
    g.q_max = parse_double(head[1], 1, "q_max");
    g.n_q = parse_count(head[2], 1, "n_q");
    g.p_min = parse_double(head[3], 1, "p_min");
    g.p_max = parse_double(head[4], 1, "p_max");
    g.n_p = parse_count(head[5], 1, "n_p");
    g.purity = parse_double(head[6], 1, "purity");
    if (!(g.q_max > g.q_min) || !(g.p_max > g.p_min)) fail(1, "window bounds must be increasing");
    if (!(g.purity > 0.0) || g.purity > 1.0) fail(1, "purity must lie in (0, 1]");

    g.values.reserve(static_cast<std::size_t>(g.n_q) * g.n_p);
    for (int i = 0; i < g.n_q; ++i) {
        int lineno = i + 2;
        if (!std::getline(in, line)) fail(lineno, "unexpected end of file: expected a value row");
        auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) != g.n_p)
            fail(lineno, "expected " + std::to_string(g.n_p) + " values, found " +
                             std::to_string(fields.size()));
        for (const auto& f : fields) g.values.push_back(parse_double(f, lineno, "value"));
    }
    while (std::getline(in, line)) {
        int lineno = g.n_q + 2;
        if (!line.empty() && line != "\r") fail(lineno, "trailing content after value rows");
    }
    return g;
}

PhaseSpaceGrid read_grid_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid file: " + path);
    return read_grid_csv(in);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_grid_csv(std::ostream& out, const PhaseSpaceGrid& g) {
    validate(g);
    out << fmt(g.q_min) << ',' << fmt(g.q_max) << ',' << g.n_q << ',' << fmt(g.p_min) << ','
        << fmt(g.p_max) << ',' << g.n_p << ',' << fmt(g.purity) << '\n';
    for (int i = 0; i < g.n_q; ++i) {
        for (int j = 0; j < g.n_p; ++j) {
            if (j) out << ',';
            out << fmt(g.at(i, j));
        }
        out << '\n';
    }
}

void write_grid_csv_file(const std::string& path, const PhaseSpaceGrid& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_grid_csv(out, g);
}

}  // namespace optprob
