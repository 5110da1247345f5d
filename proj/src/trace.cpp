#include "astrodf/solver.hpp"

#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace astrodf {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    // from_chars also accepts the "nan" / "inf" spellings fmt writes.
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError(fmt::format("trace line {}: bad number '{}'", line_no, s));
    }
    return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("trace line {}: bad integer '{}'", line_no, s));
    }
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<IterationRecord>& trace, int dimension) {
    out << "k";
    for (int i = 0; i < dimension; ++i) out << ",x_" << i;
    out << ",f_bar,f_true,delta_k,rho_hat,success,model_grad_norm,hessian_norm,lambda_hat,j_k,n_center,"
           "n_candidate,cum_calls\n";
    for (const auto& r : trace) {
        out << r.k;
        for (int i = 0; i < dimension; ++i) out << ',' << num(r.x[i]);
        out << ',' << num(r.f_bar) << ',' << num(r.f_true) << ',' << num(r.delta_k) << ',' << num(r.rho_hat) << ','
            << (r.success ? 1 : 0) << ',' << num(r.model_grad_norm) << ',' << num(r.hessian_norm) << ','
            << num(r.lambda_hat) << ',' << r.j_k << ',' << r.n_center << ',' << r.n_candidate << ',' << r.cum_calls
            << '\n';
    }
}

std::vector<IterationRecord> read_trace_csv(std::istream& in, int& dimension) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trace is empty (no header)");
    const auto header = split_csv_line(line);
    constexpr std::size_t kFixed = 13;  // k + 12 trailing columns
    if (header.size() < kFixed || header.front() != "k" || header.back() != "cum_calls") {
        throw ConfigError("trace header is not a solver trace");
    }
    dimension = static_cast<int>(header.size() - kFixed);
    for (int i = 0; i < dimension; ++i) {
        if (header[1 + static_cast<std::size_t>(i)] != "x_" + std::to_string(i)) {
            throw ConfigError("trace header has unexpected column '" + header[1 + static_cast<std::size_t>(i)] + "'");
        }
    }

    std::vector<IterationRecord> trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ConfigError(fmt::format("trace line {}: expected {} columns, got {}", line_no, header.size(),
                                          cells.size()));
        }
        IterationRecord r;
        std::size_t c = 0;
        r.k = parse_u64(cells[c++], line_no);
        r.x = Point(dimension);
        for (int i = 0; i < dimension; ++i) r.x[i] = parse_double(cells[c++], line_no);
        r.f_bar = parse_double(cells[c++], line_no);
        r.f_true = parse_double(cells[c++], line_no);
        r.delta_k = parse_double(cells[c++], line_no);
        r.rho_hat = parse_double(cells[c++], line_no);
        r.success = parse_u64(cells[c++], line_no) != 0;
        r.model_grad_norm = parse_double(cells[c++], line_no);
        r.hessian_norm = parse_double(cells[c++], line_no);
        r.lambda_hat = parse_double(cells[c++], line_no);
        r.j_k = static_cast<int>(parse_u64(cells[c++], line_no));
        r.n_center = parse_u64(cells[c++], line_no);
        r.n_candidate = parse_u64(cells[c++], line_no);
        r.cum_calls = parse_u64(cells[c++], line_no);
        trace.push_back(std::move(r));
    }
    return trace;
}

void write_summary_block(std::ostream& out, const RunSummary& s) {
    out << "final_x: ";
    for (Eigen::Index i = 0; i < s.final_x.size(); ++i) out << (i ? "," : "") << num(s.final_x[i]);
    out << '\n';
    out << "final_f_bar: " << num(s.final_f_bar) << '\n';
    out << "final_f_true: " << num(s.final_f_true) << '\n';
    out << "final_grad_norm: " << num(s.final_grad_norm) << '\n';
    out << "total_calls: " << s.total_calls << '\n';
    out << "iterations: " << s.iterations << '\n';
    out << "termination_reason: " << s.termination_reason << '\n';
    out << "hessian_warnings: " << s.hessian_warnings << '\n';
}

}  // namespace astrodf
