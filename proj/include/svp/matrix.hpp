#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "svp/error.hpp"

namespace svp {

// Dense symmetric matrix, column-major square storage. set() writes both
// mirror entries so the invariant a(i,j) == a(j,i) holds exactly by
// construction; there is no code path that can break it.
class sym_matrix {
public:
    sym_matrix() = default;
    explicit sym_matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
        require(n >= 1, errc::bad_size, "matrix dimension must be >= 1");
    }

    int n() const noexcept { return n_; }

    double operator()(int i, int j) const { return a_[idx(i, j)]; }

    void set(int i, int j, double v) {
        a_[idx(i, j)] = v;
        a_[idx(j, i)] = v;
    }

    void add(int i, int j, double v) {
        a_[idx(i, j)] += v;
        if (i != j) a_[idx(j, i)] += v;
    }

    const double* data() const noexcept { return a_.data(); }
    double* data() noexcept { return a_.data(); }

    sym_matrix& operator+=(const sym_matrix& other);
    sym_matrix& operator-=(const sym_matrix& other);
    sym_matrix& operator*=(double s);

    friend sym_matrix operator+(sym_matrix a, const sym_matrix& b) { return a += b; }
    friend sym_matrix operator-(sym_matrix a, const sym_matrix& b) { return a -= b; }

    double frobenius() const;
    double max_abs() const;
    bool operator==(const sym_matrix& other) const { return n_ == other.n_ && a_ == other.a_; }

private:
    size_t idx(int i, int j) const {
        require(i >= 0 && i < n_ && j >= 0 && j < n_, errc::index_out_of_range,
                "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside " +
                    std::to_string(n_) + "x" + std::to_string(n_));
        return static_cast<size_t>(j) * n_ + i;
    }

    int n_ = 0;
    std::vector<double> a_;
};

// Dense rectangular matrix, column-major.
class rect_matrix {
public:
    rect_matrix() = default;
    rect_matrix(int m, int n) : m_(m), n_(n), a_(static_cast<size_t>(m) * n, 0.0) {
        require(m >= 1 && n >= 1, errc::bad_size, "matrix dimensions must be >= 1");
    }

    int rows() const noexcept { return m_; }
    int cols() const noexcept { return n_; }

    double operator()(int i, int j) const { return a_[idx(i, j)]; }
    double& operator()(int i, int j) { return a_[idx(i, j)]; }

    const double* data() const noexcept { return a_.data(); }
    double* data() noexcept { return a_.data(); }

    rect_matrix& operator+=(const rect_matrix& other);
    rect_matrix& operator-=(const rect_matrix& other);

    friend rect_matrix operator+(rect_matrix a, const rect_matrix& b) { return a += b; }
    friend rect_matrix operator-(rect_matrix a, const rect_matrix& b) { return a -= b; }

    double max_abs() const;
    bool operator==(const rect_matrix& other) const {
        return m_ == other.m_ && n_ == other.n_ && a_ == other.a_;
    }

private:
    size_t idx(int i, int j) const {
        require(i >= 0 && i < m_ && j >= 0 && j < n_, errc::index_out_of_range,
                "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside " +
                    std::to_string(m_) + "x" + std::to_string(n_));
        return static_cast<size_t>(j) * m_ + i;
    }

    int m_ = 0, n_ = 0;
    std::vector<double> a_;
};

// Sorted, duplicate-free coordinate subset of {0, ..., n-1}.
class index_set {
public:
    index_set() = default;
    index_set(std::vector<int> ids, int universe);

    int universe() const noexcept { return universe_; }
    int size() const noexcept { return static_cast<int>(ids_.size()); }
    bool contains(int i) const;
    const std::vector<int>& ids() const noexcept { return ids_; }

    bool operator==(const index_set& other) const {
        return universe_ == other.universe_ && ids_ == other.ids_;
    }

private:
    std::vector<int> ids_;
    int universe_ = 0;
};

// Plain text round-trip format: optional leading '#' comment lines, then a
// "m n" header line, then m rows of n values at 17 significant digits
// (exact double round-trip). Readers skip the comment lines, so files with
// an embedded provenance comment stay loadable.
void write_matrix(std::ostream& os, const rect_matrix& a);
void write_matrix(std::ostream& os, const sym_matrix& a);
rect_matrix read_rect_matrix(std::istream& is);
sym_matrix read_sym_matrix(std::istream& is);

// header, when nonempty, is written first as a single '#' comment line.
void save_matrix(const std::string& path, const rect_matrix& a, const std::string& header = "");
void save_matrix(const std::string& path, const sym_matrix& a, const std::string& header = "");
rect_matrix load_rect_matrix(const std::string& path);
sym_matrix load_sym_matrix(const std::string& path);

// Exact-decimal double formatting shared by matrix I/O and CSV artifacts.
std::string format_double(double v);

} // namespace svp
