#pragma once

// Flat-file formats: dataset CSV, posterior draws, summaries and design
// surfaces. Human-facing tables use 6 significant digits; CSV artifacts
// carry full precision.

#include <filesystem>
#include <string>
#include <vector>

#include "ssalt/design.hpp"
#include "ssalt/mle.hpp"
#include "ssalt/posterior.hpp"

namespace ssalt::io {

// Header "time,cause". Throws DataError with "path:line:" context.
Dataset read_dataset_csv(const std::filesystem::path& path,
                         const DesignSpec& design);
std::vector<Observation> parse_observations(const std::string& text,
                                            const std::string& source);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

void write_draws_csv(const std::filesystem::path& path,
                     const PosteriorDraws& draws);
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);
// Columns quantity,chain,lag,acf for lags 1..max_lag.
void write_acf_csv(const std::filesystem::path& path,
                   const PosteriorDraws& draws, int max_lag);
void write_edf_csv(const std::filesystem::path& path,
                   const std::vector<EdfPoint>& curve);
void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<CriterionPoint>& grid);
void write_fine_csv(const std::filesystem::path& path,
                    const std::vector<FinePoint>& fine);
void write_optimum_csv(const std::filesystem::path& path,
                       const CriterionSurface& surface);

void write_text(const std::filesystem::path& path, const std::string& text);

// "%.6g"
std::string fmt6(double v);
// Shortest round-trip representation.
std::string full(double v);

}  // namespace ssalt::io
