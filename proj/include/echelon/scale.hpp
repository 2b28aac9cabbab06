#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "echelon/series.hpp"

namespace echelon {

enum class ScaleKind { MajorantDisk, HilbertPolydisk, FourierStrip, Mixed };

inline const char* scale_kind_name(ScaleKind k) {
    switch (k) {
        case ScaleKind::MajorantDisk: return "majorant-disk";
        case ScaleKind::HilbertPolydisk: return "hilbert-polydisk";
        case ScaleKind::FourierStrip: return "fourier-strip";
        case ScaleKind::Mixed: return "mixed";
    }
    return "?";
}

// Diagonal norm family |f|_s built from per-monomial weights w(a, s).
//  MajorantDisk    sum |c| s^|a|                    (Taylor slots only)
//  HilbertPolydisk sqrt(sum |c|^2 prod pi s^(2a+2)/(a+1))
//  FourierStrip    sum |c| e^(sigma(i) s)           (Fourier slots only)
//  Mixed           sum |c| e^(sigma(i) s) s^deg, deformation slots count s^2
struct ScaleFamily {
    ScaleKind kind = ScaleKind::MajorantDisk;
    double S = 1.0;
    std::vector<int> deformation_slots;

    static ScaleFamily majorant(double S = 1.0) { return {ScaleKind::MajorantDisk, S, {}}; }
    static ScaleFamily hilbert(double S = 1.0) { return {ScaleKind::HilbertPolydisk, S, {}}; }
    static ScaleFamily strip(double S = 1.0) { return {ScaleKind::FourierStrip, S, {}}; }
    static ScaleFamily mixed(double S = 1.0, std::vector<int> deformation = {}) {
        return {ScaleKind::Mixed, S, std::move(deformation)};
    }

    std::string name() const { return scale_kind_name(kind); }

    void check_domain(double s) const {
        if (!(s > 0.0 && s < S))
            throw ScaleDomainError("scale parameter " + std::to_string(s) + " outside (0," + std::to_string(S) + ")");
    }

    void check_signature(const Signature& sig) const {
        if (kind == ScaleKind::MajorantDisk && sig.fourier > 0)
            throw PreconditionError("majorant-disk scale has no Fourier slots; use mixed");
        if (kind == ScaleKind::HilbertPolydisk && sig.fourier > 0)
            throw PreconditionError("hilbert-polydisk scale has no Fourier slots");
        if (kind == ScaleKind::FourierStrip && sig.taylor > 0)
            throw PreconditionError("fourier-strip scale has no Taylor slots; use mixed");
    }

    bool is_deformation(int slot) const {
        for (int k : deformation_slots)
            if (k == slot) return true;
        return false;
    }

    // Exponent D and strip mass m with w(a,s) = c_a * s^D * e^(m s).
    void exponents(const MultiIndex& a, const Signature& sig, double& D, double& m) const {
        D = 0;
        m = 0;
        for (int k = 0; k < sig.slots(); ++k) {
            int e = std::abs(a[k]);
            if (sig.is_fourier(k)) m += e;
            else if (kind == ScaleKind::HilbertPolydisk) D += e + 1;
            else D += is_deformation(k) ? 2.0 * e : e;
        }
    }

    // Weight of a single monomial; the L2 norm of the monomial in the
    // Hilbert case.
    double weight(const MultiIndex& a, const Signature& sig, double s) const {
        double w = 1.0;
        for (int k = 0; k < sig.slots(); ++k) {
            int e = std::abs(a[k]);
            if (sig.is_fourier(k)) {
                w *= std::exp(e * s);
            } else if (kind == ScaleKind::HilbertPolydisk) {
                w *= std::sqrt(std::numbers::pi * std::pow(s, 2.0 * e + 2.0) / (e + 1.0));
            } else {
                w *= std::pow(s, is_deformation(k) ? 2.0 * e : static_cast<double>(e));
            }
        }
        return w;
    }
};

template <class S>
double norm_at(const Series<S>& f, const ScaleFamily& scale, double s) {
    scale.check_domain(s);
    scale.check_signature(f.signature());
    const auto& sig = f.signature();
    if (scale.kind == ScaleKind::HilbertPolydisk) {
        double acc = 0;
        for (const auto& [a, v] : f.coeffs()) {
            double x = ScalarTraits<S>::abs(v) * scale.weight(a, sig, s);
            acc += x * x;
        }
        return std::sqrt(acc);
    }
    double acc = 0;
    for (const auto& [a, v] : f.coeffs()) acc += ScalarTraits<S>::abs(v) * scale.weight(a, sig, s);
    return acc;
}

}  // namespace echelon
