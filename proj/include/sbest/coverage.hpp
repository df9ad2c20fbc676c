#ifndef SBEST_COVERAGE_HPP
#define SBEST_COVERAGE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "sbest/method_id.hpp"

namespace sbest {

enum class Outcome { kPass, kFail };

struct TestCase {
    std::size_t test_id = 0;
    std::string name;
    Outcome outcome = Outcome::kPass;
};

struct SpectraLine {
    std::string uid;                 // identifier as written in spectra.csv
    std::optional<MethodId> method;  // nullopt for class-level lines
    int line_number = 0;
};

/// Test x line hit matrix (row = test, column = line), stored sparse.
using HitMatrix = Eigen::SparseMatrix<std::int32_t, Eigen::RowMajor>;
/// Test x method matrix of covered-line counts.
using MethodCountMatrix = Eigen::SparseMatrix<std::int32_t, Eigen::ColMajor>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

class UnknownMethodError : public Error {
public:
    using Error::Error;
};

/// Per-method coverage of one method across the whole suite.
struct MethodCoverageSummary {
    MethodId method;
    std::vector<std::size_t> covering_tests;           // ascending test ids
    std::map<std::size_t, std::int64_t> lines_covered_by;  // only covering tests
    std::size_t method_line_count = 0;

    std::int64_t lines_for(std::size_t test) const {
        auto it = lines_covered_by.find(test);
        return it == lines_covered_by.end() ? 0 : it->second;
    }
};

/// Immutable coverage spectrum of one bug.
///
/// Methods are numbered densely in order of first appearance in the spectra
/// file; `method_counts()` holds, for every (test, method) pair, how many of
/// the method's lines the test hit.
class CoverageDataset {
public:
    CoverageDataset(std::vector<TestCase> tests, std::vector<SpectraLine> lines,
                    const std::vector<std::vector<bool>>& rows);

    std::size_t test_count() const noexcept { return tests_.size(); }
    std::size_t line_count() const noexcept { return lines_.size(); }
    std::size_t method_count() const noexcept { return methods_.size(); }

    std::span<const TestCase> tests() const noexcept { return tests_; }
    std::span<const SpectraLine> lines() const noexcept { return lines_; }
    std::span<const MethodId> methods() const noexcept { return methods_; }
    const HitMatrix& hits() const noexcept { return hits_; }
    const MethodCountMatrix& method_counts() const noexcept { return method_counts_; }

    /// Column indices of the lines owned by method `k`.
    std::span<const std::size_t> method_columns(std::size_t k) const { return columns_[k]; }

    /// Exact lookup by canonical id.
    std::optional<std::size_t> method_ordinal(const MethodId& m) const;

    /// Every method that `same_method` matches, ascending ordinal. A trace
    /// frame without a signature matches all overloads.
    std::vector<std::size_t> matching_methods(const MethodId& m) const;

    std::vector<std::size_t> failing_tests() const;

    /// Per-test covered-line counts for one method, as a dense vector.
    CountVector lines_covered(std::size_t method_ordinal) const;

    /// Canonical text re-serialization: tests.csv, spectra.csv and matrix.txt
    /// concatenated with section markers.
    std::string canonical_dump() const;

private:
    std::vector<TestCase> tests_;
    std::vector<SpectraLine> lines_;
    std::vector<MethodId> methods_;
    std::vector<std::vector<std::size_t>> columns_;
    std::map<MethodId, std::size_t> ordinal_;
    std::map<std::string, std::vector<std::size_t>> by_coarse_key_;
    HitMatrix hits_;
    MethodCountMatrix method_counts_;
};

/// Parses one spectra identifier `<package>$<Class>#<method>[(<params>)]:<line>`.
/// `<package>$<Class>:<line>` denotes a line outside any method.
SpectraLine parse_spectra_line(std::string_view text);

/// Loads tests.csv, spectra.csv and matrix.txt from a bug directory.
CoverageDataset load_dataset(const std::filesystem::path& bug_dir);

/// Parses the three files from memory; the names are used in diagnostics.
CoverageDataset parse_dataset(std::string_view tests_csv, std::string_view spectra_csv,
                              std::string_view matrix_txt);

/// Throws UnknownMethodError when `m` has no exact entry in the spectra.
MethodCoverageSummary method_summary(const CoverageDataset& ds, const MethodId& m);

std::string read_file(const std::filesystem::path& path);

}  // namespace sbest

#endif  // SBEST_COVERAGE_HPP
