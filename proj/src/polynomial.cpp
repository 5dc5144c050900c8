#include "ccdc/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace ccdc {

Polynomial::Polynomial(std::initializer_list<double> ascending) : c_(ascending) { trim(); }

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) { trim(); }

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

int Polynomial::origin_multiplicity() const noexcept {
    int k = 0;
    while (k < static_cast<int>(c_.size()) && c_[k] == 0.0) ++k;
    return is_zero() ? 0 : k;
}

Polynomial Polynomial::divide_by_s_power(int k) const {
    if (k == 0 || is_zero()) return *this;
    for (int i = 0; i < k; ++i) {
        if ((*this)[i] != 0.0) throw std::invalid_argument("polynomial is not divisible by s^k");
    }
    return Polynomial(std::vector<double>(c_.begin() + k, c_.end()));
}

std::vector<std::complex<double>> Polynomial::roots() const {
    std::vector<std::complex<double>> out;
    const int k = origin_multiplicity();
    out.assign(k, {0.0, 0.0});
    const Polynomial p = divide_by_s_power(k);
    const int n = p.degree();
    if (n < 1) return out;

    // Substitute s = w z so the scaled coefficients have comparable size.
    const double w = std::pow(std::abs(p[0] / p[n]), 1.0 / n);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    const double lead = p[n] * std::pow(w, n);
    for (int i = 0; i < n; ++i) {
        companion(0, n - 1 - i) = -p[i] * std::pow(w, i) / lead;
    }
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    for (int i = 0; i < n; ++i) out.push_back(w * solver.eigenvalues()(i));
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
        return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a.imag() < b.imag();
    });
    return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a + (-1.0) * b;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
}

Polynomial operator*(double k, const Polynomial& a) {
    std::vector<double> c = a.c_;
    for (double& x : c) x *= k;
    return Polynomial(std::move(c));
}

}  // namespace ccdc
