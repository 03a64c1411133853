#pragma once

#include <string>
#include <vector>

#include "isar/correlation.hpp"
#include "isar/migration.hpp"

namespace isar {

/// CSV matrix: one row per line, %.17g fields, comma separated.
void write_csv(const std::string& path, const MatXd& values);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const MatXd& values);
MatXd read_csv(const std::string& path);

/// 8-bit binary PGM (P5) of a normalized image, row iy = 0 at the top.
void write_pgm(const std::string& path, const Image& image);

/// Binary layouts (little-endian, 8-byte magic + u64 dimensions + f64/complex128
/// payloads in row-major order):
///   echoes       "ISARUF01" | n_recv n_pulse n_bin | slow_times omega |
///                per receiver: complex128 spectra (pulse-major)
///   correlations "ISARCS01" | n_recv n_pulse n_bin n_lag | x0 v0 slow_times
///                omega lags | per receiver: complex128 spectra, f64 autocorr,
///                f64 autocorr envelope
void write_echoes(const std::string& path, const EchoSetFreq& echoes);
EchoSetFreq read_echoes(const std::string& path);
void write_correlations(const std::string& path, const CorrelationSet& set);
CorrelationSet read_correlations(const std::string& path);

/// |C_R(s, tau)| for one receiver as CSV: first row lags, then one row per pulse.
void write_autocorrelation_csv(const std::string& path, const CorrelationSet& set, int receiver);

void ensure_directory(const std::string& path);

}  // namespace isar
