#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace ccdc {

/// Real polynomial in s, coefficients in ascending powers. The zero
/// polynomial is stored as an empty coefficient list.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> ascending);
    explicit Polynomial(std::vector<double> ascending);

    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const noexcept { return c_.empty(); }
    const std::vector<double>& coefficients() const noexcept { return c_; }
    double operator[](std::size_t power) const noexcept {
        return power < c_.size() ? c_[power] : 0.0;
    }

    std::complex<double> operator()(std::complex<double> s) const;

    /// Multiplicity of the root at the origin (0 for the zero polynomial).
    int origin_multiplicity() const noexcept;
    /// Divides by s^k; the lowest k coefficients must be zero.
    Polynomial divide_by_s_power(int k) const;

    /// Roots via companion-matrix eigenvalues on a frequency-scaled copy.
    std::vector<std::complex<double>> roots() const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double k, const Polynomial& a);
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim();
    std::vector<double> c_;
};

}  // namespace ccdc
