#include "svp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace svp {

sym_matrix& sym_matrix::operator+=(const sym_matrix& other) {
    require(n_ == other.n_, errc::shape_mismatch, "sym_matrix sizes differ");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
    return *this;
}

sym_matrix& sym_matrix::operator-=(const sym_matrix& other) {
    require(n_ == other.n_, errc::shape_mismatch, "sym_matrix sizes differ");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= other.a_[k];
    return *this;
}

sym_matrix& sym_matrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

double sym_matrix::frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double sym_matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

rect_matrix& rect_matrix::operator+=(const rect_matrix& other) {
    require(m_ == other.m_ && n_ == other.n_, errc::shape_mismatch, "rect_matrix shapes differ");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
    return *this;
}

rect_matrix& rect_matrix::operator-=(const rect_matrix& other) {
    require(m_ == other.m_ && n_ == other.n_, errc::shape_mismatch, "rect_matrix shapes differ");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= other.a_[k];
    return *this;
}

double rect_matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

index_set::index_set(std::vector<int> ids, int universe) : ids_(std::move(ids)), universe_(universe) {
    require(universe >= 0, errc::bad_size, "index_set universe must be >= 0");
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    for (int i : ids_)
        require(i >= 0 && i < universe, errc::index_out_of_range,
                "index " + std::to_string(i) + " outside universe of " + std::to_string(universe));
}

bool index_set::contains(int i) const {
    return std::binary_search(ids_.begin(), ids_.end(), i);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_matrix(std::ostream& os, const rect_matrix& a) {
    os << a.rows() << ' ' << a.cols() << '\n';
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            if (j) os << ' ';
            os << format_double(a(i, j));
        }
        os << '\n';
    }
}

void write_matrix(std::ostream& os, const sym_matrix& a) {
    os << a.n() << ' ' << a.n() << '\n';
    for (int i = 0; i < a.n(); ++i) {
        for (int j = 0; j < a.n(); ++j) {
            if (j) os << ' ';
            os << format_double(a(i, j));
        }
        os << '\n';
    }
}

rect_matrix read_rect_matrix(std::istream& is) {
    while (is.peek() == '#') is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    int m = 0, n = 0;
    if (!(is >> m >> n)) fail(errc::io_error, "matrix header 'm n' missing");
    require(m >= 1 && n >= 1, errc::io_error, "matrix header dimensions must be >= 1");
    rect_matrix a(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (!(is >> a(i, j))) fail(errc::io_error, "matrix body short read");
    return a;
}

sym_matrix read_sym_matrix(std::istream& is) {
    rect_matrix r = read_rect_matrix(is);
    require(r.rows() == r.cols(), errc::non_symmetric, "symmetric matrix must be square");
    sym_matrix a(r.rows());
    for (int i = 0; i < r.rows(); ++i)
        for (int j = i; j < r.cols(); ++j) {
            require(r(i, j) == r(j, i), errc::non_symmetric,
                    "entry mismatch at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            a.set(i, j, r(i, j));
        }
    return a;
}

namespace {

template <class M>
void save_impl(const std::string& path, const M& a, const std::string& header) {
    std::ofstream os(path);
    require(os.good(), errc::io_error, "cannot open " + path + " for writing");
    if (!header.empty()) os << "# " << header << '\n';
    write_matrix(os, a);
    os.flush();
    require(os.good(), errc::io_error, "short write to " + path);
}

} // namespace

void save_matrix(const std::string& path, const rect_matrix& a, const std::string& header) {
    save_impl(path, a, header);
}
void save_matrix(const std::string& path, const sym_matrix& a, const std::string& header) {
    save_impl(path, a, header);
}

rect_matrix load_rect_matrix(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), errc::io_error, "cannot open " + path);
    return read_rect_matrix(is);
}

sym_matrix load_sym_matrix(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), errc::io_error, "cannot open " + path);
    return read_sym_matrix(is);
}

} // namespace svp
