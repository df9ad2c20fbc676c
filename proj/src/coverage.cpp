#include "sbest/coverage.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sbest {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

// Splits into lines, dropping a trailing '\r' on each.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        start = end + 1;
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<TestCase> parse_tests(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t i = 0;
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
    if (i == lines.size()) throw Error("tests.csv: missing header");
    const auto header = split(trim(lines[i]), ',');
    if (header.size() < 2 || trim(header[0]) != "name" || trim(header[1]) != "outcome")
        throw Error("tests.csv: header must start with 'name,outcome'");

    std::vector<TestCase> tests;
    for (++i; i < lines.size(); ++i) {
        const auto line = trim(lines[i]);
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < 2)
            throw Error("tests.csv line " + std::to_string(i + 1) + ": expected name,outcome");
        const auto name = trim(fields[0]);
        const auto outcome = trim(fields[1]);
        if (name.empty()) throw Error("tests.csv line " + std::to_string(i + 1) + ": empty test name");
        Outcome o;
        if (outcome == "PASS")
            o = Outcome::kPass;
        else if (outcome == "FAIL")
            o = Outcome::kFail;
        else
            throw Error("tests.csv line " + std::to_string(i + 1) + ": unknown outcome '" +
                        std::string(outcome) + "'");
        tests.push_back({tests.size(), std::string(name), o});
    }
    return tests;
}

std::vector<SpectraLine> parse_spectra(std::string_view text) {
    std::vector<SpectraLine> lines;
    const auto raw = split_lines(text);
    bool first = true;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto line = trim(raw[i]);
        if (line.empty()) continue;
        if (first && line == "name") {  // GZoltar header
            first = false;
            continue;
        }
        first = false;
        try {
            lines.push_back(parse_spectra_line(line));
        } catch (const Error& e) {
            throw Error("spectra.csv row " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return lines;
}

std::vector<std::vector<bool>> parse_matrix(std::string_view text, std::span<const TestCase> tests,
                                            std::size_t columns) {
    std::vector<std::vector<bool>> rows;
    const auto raw = split_lines(text);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto line = trim(raw[i]);
        if (line.empty()) continue;
        std::vector<bool> row;
        std::optional<char> verdict;
        std::istringstream tokens{std::string(line)};
        std::string tok;
        while (tokens >> tok) {
            if (verdict) throw Error("matrix.txt line " + std::to_string(i + 1) + ": token after verdict");
            if (tok == "0")
                row.push_back(false);
            else if (tok == "1")
                row.push_back(true);
            else if (tok == "+" || tok == "-")
                verdict = tok[0];
            else
                throw Error("matrix.txt line " + std::to_string(i + 1) + ": bad token '" + tok + "'");
        }
        const std::size_t r = rows.size();
        if (row.size() != columns)
            throw Error("matrix.txt row " + std::to_string(r + 1) + " has " +
                        std::to_string(row.size()) + " columns but spectra.csv lists " +
                        std::to_string(columns) + " lines");
        if (verdict && r < tests.size()) {
            const bool fail = *verdict == '-';
            if (fail != (tests[r].outcome == Outcome::kFail))
                throw Error("matrix.txt row " + std::to_string(r + 1) + ": verdict '" + *verdict +
                            "' disagrees with tests.csv outcome of " + tests[r].name);
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() != tests.size())
        throw Error("dimension mismatch: matrix.txt has " + std::to_string(rows.size()) +
                    " rows but tests.csv lists " + std::to_string(tests.size()) + " tests");
    return rows;
}

}  // namespace

SpectraLine parse_spectra_line(std::string_view text) {
    text = trim(text);
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw Error("missing ':<line>' in '" + std::string(text) + "'");
    const auto digits = text.substr(colon + 1);
    int line_no = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), line_no);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || line_no < 0)
        throw Error("bad line number in '" + std::string(text) + "'");
    const auto id = text.substr(0, colon);

    SpectraLine out;
    out.uid = std::string(text);
    out.line_number = line_no;
    if (id.find('#') == std::string_view::npos) {
        if (id.find('$') == std::string_view::npos || id.back() == '$')
            throw Error("malformed class-level identifier '" + std::string(text) + "'");
        return out;
    }
    out.method = MethodId::parse(id);
    return out;
}

CoverageDataset::CoverageDataset(std::vector<TestCase> tests, std::vector<SpectraLine> lines,
                                 const std::vector<std::vector<bool>>& rows)
    : tests_(std::move(tests)), lines_(std::move(lines)) {
    const auto T = static_cast<Eigen::Index>(tests_.size());
    const auto L = static_cast<Eigen::Index>(lines_.size());
    if (rows.size() != tests_.size())
        throw Error("dimension mismatch: " + std::to_string(rows.size()) + " matrix rows for " +
                    std::to_string(tests_.size()) + " tests");

    std::vector<std::size_t> column_method(lines_.size(), SIZE_MAX);
    for (std::size_t c = 0; c < lines_.size(); ++c) {
        if (!lines_[c].method) continue;
        const MethodId& m = *lines_[c].method;
        auto [it, inserted] = ordinal_.try_emplace(m, methods_.size());
        if (inserted) {
            methods_.push_back(m);
            columns_.emplace_back();
            by_coarse_key_[m.coarse().str()].push_back(it->second);
        }
        columns_[it->second].push_back(c);
        column_method[c] = it->second;
    }

    std::vector<Eigen::Triplet<std::int32_t>> hit_entries;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != lines_.size())
            throw Error("dimension mismatch: matrix row " + std::to_string(r + 1) + " has " +
                        std::to_string(rows[r].size()) + " columns for " +
                        std::to_string(lines_.size()) + " lines");
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            if (rows[r][c]) hit_entries.emplace_back(static_cast<int>(r), static_cast<int>(c), 1);
    }
    hits_.resize(T, L);
    hits_.setFromTriplets(hit_entries.begin(), hit_entries.end());

    std::vector<Eigen::Triplet<std::int32_t>> assign_entries;
    for (std::size_t c = 0; c < column_method.size(); ++c)
        if (column_method[c] != SIZE_MAX)
            assign_entries.emplace_back(static_cast<int>(c), static_cast<int>(column_method[c]), 1);
    Eigen::SparseMatrix<std::int32_t, Eigen::ColMajor> assignment(
        L, static_cast<Eigen::Index>(methods_.size()));
    assignment.setFromTriplets(assign_entries.begin(), assign_entries.end());

    method_counts_ = MethodCountMatrix(hits_ * assignment);
    method_counts_.prune(std::int32_t{0});
    method_counts_.makeCompressed();
}

std::optional<std::size_t> CoverageDataset::method_ordinal(const MethodId& m) const {
    auto it = ordinal_.find(m);
    if (it == ordinal_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> CoverageDataset::matching_methods(const MethodId& m) const {
    auto it = by_coarse_key_.find(m.coarse().str());
    if (it == by_coarse_key_.end()) return {};
    std::vector<std::size_t> out;
    for (std::size_t k : it->second)
        if (same_method(methods_[k], m)) out.push_back(k);
    return out;
}

std::vector<std::size_t> CoverageDataset::failing_tests() const {
    std::vector<std::size_t> out;
    for (const auto& t : tests_)
        if (t.outcome == Outcome::kFail) out.push_back(t.test_id);
    return out;
}

CountVector CoverageDataset::lines_covered(std::size_t k) const {
    CountVector out = CountVector::Zero(static_cast<Eigen::Index>(tests_.size()));
    for (MethodCountMatrix::InnerIterator it(method_counts_, static_cast<Eigen::Index>(k)); it; ++it)
        out(it.row()) = it.value();
    return out;
}

std::string CoverageDataset::canonical_dump() const {
    std::string out = "[tests]\nname,outcome\n";
    for (const auto& t : tests_) out += t.name + (t.outcome == Outcome::kFail ? ",FAIL\n" : ",PASS\n");
    out += "[spectra]\n";
    for (const auto& l : lines_) out += l.uid + '\n';
    out += "[matrix]\n";
    const Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic> dense(hits_);
    for (Eigen::Index r = 0; r < dense.rows(); ++r) {
        for (Eigen::Index c = 0; c < dense.cols(); ++c) {
            if (c) out += ' ';
            out += dense(r, c) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

CoverageDataset parse_dataset(std::string_view tests_csv, std::string_view spectra_csv,
                              std::string_view matrix_txt) {
    auto tests = parse_tests(tests_csv);
    auto lines = parse_spectra(spectra_csv);
    const auto rows = parse_matrix(matrix_txt, tests, lines.size());
    return CoverageDataset(std::move(tests), std::move(lines), rows);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CoverageDataset load_dataset(const std::filesystem::path& bug_dir) {
    for (const char* name : {"tests.csv", "spectra.csv", "matrix.txt"})
        if (!std::filesystem::is_regular_file(bug_dir / name))
            throw Error("missing " + (bug_dir / name).string());
    return parse_dataset(read_file(bug_dir / "tests.csv"), read_file(bug_dir / "spectra.csv"),
                         read_file(bug_dir / "matrix.txt"));
}

MethodCoverageSummary method_summary(const CoverageDataset& ds, const MethodId& m) {
    auto k = ds.method_ordinal(m);
    if (!k) {
        const auto candidates = ds.matching_methods(m);
        if (candidates.size() != 1)
            throw UnknownMethodError("method not present in spectra: " + m.str());
        k = candidates.front();
    }
    MethodCoverageSummary s;
    s.method = ds.methods()[*k];
    s.method_line_count = ds.method_columns(*k).size();
    for (MethodCountMatrix::InnerIterator it(ds.method_counts(), static_cast<Eigen::Index>(*k)); it;
         ++it) {
        if (it.value() <= 0) continue;
        const auto t = static_cast<std::size_t>(it.row());
        s.covering_tests.push_back(t);
        s.lines_covered_by[t] = it.value();
    }
    return s;
}

}  // namespace sbest
