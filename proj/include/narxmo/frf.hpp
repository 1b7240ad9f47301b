#pragma once

#include "narxmo/narx.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace narxmo {

struct LinearFRF {
    std::vector<double> frequencies;  // Hz
    std::vector<std::complex<double>> response;
    double fs = 1.0;
    bool degenerate = false;  // no linear input term: zero numerator

    double magnitude_db(std::size_t i) const;
    // Frequency of the largest |H1| on the grid.
    double peak_frequency() const;
};

inline constexpr std::size_t kDefaultFrfPoints = 2048;

// n evenly spaced points over [0, fs/2], both ends included.
std::vector<double> frequency_grid(double fs, std::size_t n = kDefaultFrfPoints);

// Linear AR / X coefficients a_i (of y(k-i)) and b_i (of u(k-i)); index 0 is
// lag 1.
struct LinearPart {
    std::vector<double> a;
    std::vector<double> b;
};
LinearPart linear_part(const EstimatedModel& model);

// H1(e^{jw}) = sum b_i e^{-jwi} / (1 - sum a_i e^{-jwi}), w = 2 pi f / fs.
std::complex<double> evaluate_h1(const LinearPart& lp, double f, double fs);

LinearFRF linear_frf(const EstimatedModel& model, double fs, const std::vector<double>& grid);
LinearFRF linear_frf(const EstimatedModel& model, double fs);

// Angle of the largest-modulus complex pole pair of the linear AR part mapped
// to Hz; none when every pole is real.
std::optional<double> resonance_from_poles(const EstimatedModel& model, double fs);

}  // namespace narxmo
