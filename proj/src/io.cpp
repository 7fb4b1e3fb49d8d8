#include "sparselab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sparselab {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream is(line);
    while (std::getline(is, item, sep)) parts.push_back(item);
    return parts;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::runtime_error("malformed number '" + s + "' in " + where);
    }
}

long parse_long(const std::string& s, const std::string& where) {
    try {
        return std::stol(s);
    } catch (const std::exception&) {
        throw std::runtime_error("malformed integer '" + s + "' in " + where);
    }
}

} // namespace

void write_matrix_csv(const std::string& path, const SensingMatrix& A) {
    auto out = open_out(path);
    out << "# " << A.rows() << ',' << A.cols() << ',' << A.seed << '\n';
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (j) out << ',';
            out << fmt17(A.entries(i, j));
        }
        out << '\n';
    }
}

SensingMatrix read_matrix_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
        throw std::runtime_error("matrix CSV missing '# rows,cols,seed' header: " + path);
    const auto header = split(line.substr(1), ',');
    if (header.size() != 3)
        throw std::runtime_error("malformed matrix CSV header: " + path);
    const long rows = parse_long(header[0], path);
    const long cols = parse_long(header[1], path);
    SensingMatrix A;
    A.seed = static_cast<std::uint64_t>(parse_long(header[2], path));
    A.entries.resize(rows, cols);
    for (long i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("matrix CSV truncated at row " + std::to_string(i));
        const auto parts = split(line, ',');
        if (static_cast<long>(parts.size()) != cols)
            throw std::runtime_error("matrix CSV row " + std::to_string(i) + " has wrong arity");
        for (long j = 0; j < cols; ++j) A.entries(i, j) = parse_double(parts[j], path);
    }
    return A;
}

void write_vector_csv(const std::string& path, const Eigen::VectorXd& v) {
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < v.size(); ++i) out << fmt17(v(i)) << '\n';
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        values.push_back(parse_double(line, path));
    }
    Eigen::VectorXd v(values.size());
    for (size_t i = 0; i < values.size(); ++i) v(i) = values[i];
    return v;
}

void write_solution_csv(const std::string& path, const LassoSolution& sol) {
    auto out = open_out(path);
    out << "# lambda=" << fmt17(sol.lambda)
        << ",n=" << sol.x.size()
        << ",iterations=" << sol.iterations
        << ",duality_gap=" << fmt17(sol.duality_gap)
        << ",atr_inf=" << fmt17(sol.atr_inf)
        << ",pairing_defect=" << fmt17(sol.pairing_defect)
        << ",s_lambda=" << sol.s_lambda << '\n';
    for (int idx : sol.support) out << idx << ',' << fmt17(sol.x(idx)) << '\n';
}

LassoSolution read_solution_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.size() < 2 || line[0] != '#')
        throw std::runtime_error("solution CSV missing metadata header: " + path);
    LassoSolution sol;
    long n = 0;
    for (const auto& field : split(line.substr(1), ',')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("malformed solution CSV header field: " + field);
        std::string key = field.substr(0, eq);
        key.erase(0, key.find_first_not_of(' '));
        const std::string value = field.substr(eq + 1);
        if (key == "lambda") sol.lambda = parse_double(value, path);
        else if (key == "n") n = parse_long(value, path);
        else if (key == "iterations") sol.iterations = static_cast<int>(parse_long(value, path));
        else if (key == "duality_gap") sol.duality_gap = parse_double(value, path);
        else if (key == "atr_inf") sol.atr_inf = parse_double(value, path);
        else if (key == "pairing_defect") sol.pairing_defect = parse_double(value, path);
        else if (key == "s_lambda") sol.s_lambda = static_cast<int>(parse_long(value, path));
        else throw std::runtime_error("unknown solution CSV header key: " + key);
    }
    sol.x = Eigen::VectorXd::Zero(n);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto parts = split(line, ',');
        if (parts.size() != 2)
            throw std::runtime_error("malformed solution CSV row: " + line);
        const long idx = parse_long(parts[0], path);
        if (idx < 0 || idx >= n)
            throw std::runtime_error("solution CSV index out of range: " + parts[0]);
        sol.x(idx) = parse_double(parts[1], path);
        sol.support.push_back(static_cast<int>(idx));
    }
    return sol;
}

} // namespace sparselab
