#include "ssalt/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ssalt/errors.hpp"

namespace ssalt::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <class T>
bool parse_number(const std::string& field, T& value) {
  const char* first = field.data();
  const char* last = first + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::string fmt6(double v) { return fmt::format("{:.6g}", v); }
std::string full(double v) { return fmt::format("{}", v); }

std::vector<Observation> parse_observations(const std::string& text,
                                            const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw DataError(source + ":" + std::to_string(line_no) + ": " + what);
  };
  bool header = false;
  std::vector<Observation> obs;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      std::string h = line;
      h.erase(std::remove(h.begin(), h.end(), ' '), h.end());
      if (h != "time,cause") fail("expected header 'time,cause', got '" + line + "'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail("expected two fields 'time,cause'");
    }
    const std::string t = trim(line.substr(0, comma));
    const std::string c = trim(line.substr(comma + 1));
    Observation o;
    if (!parse_number(t, o.time)) fail("time '" + t + "' is not a number");
    if (!(o.time > 0.0) || !std::isfinite(o.time)) {
      fail("time " + t + " must be positive and finite");
    }
    if (!parse_number(c, o.cause)) fail("cause '" + c + "' is not an integer");
    if (o.cause < 0 || o.cause > 2) {
      fail("cause " + c + " is not one of 0 (censored), 1, 2");
    }
    obs.push_back(o);
  }
  if (!header) {
    line_no = 0;
    fail("empty file (expected header 'time,cause')");
  }
  if (obs.empty()) fail("no observations after the header");
  return obs;
}

Dataset read_dataset_csv(const std::filesystem::path& path,
                         const DesignSpec& design) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto obs = parse_observations(buf.str(), path.string());
  try {
    return Dataset(design, std::move(obs));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  out << "time,cause\n";
  for (const auto& o : data.observations()) {
    out << full(o.time) << ',' << o.cause << '\n';
  }
}

void write_draws_csv(const std::filesystem::path& path,
                     const PosteriorDraws& draws) {
  auto out = open_out(path);
  out << "chain,draw,lp__";
  for (const auto& n : quantity_names()) out << ',' << n;
  out << '\n';
  for (Eigen::Index r = 0; r < draws.values.rows(); ++r) {
    const auto u = static_cast<std::size_t>(r);
    out << draws.chain[u] << ',' << (r % draws.iter_sampling) << ','
        << full(draws.lp[u]);
    for (Eigen::Index c = 0; c < draws.values.cols(); ++c) {
      out << ',' << full(draws.values(r, c));
    }
    out << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "variable,mean,median,sd,mad,q5,q95,rhat,ess_bulk,ess_tail\n";
  for (const auto& r : rows) {
    out << r.name;
    for (double v : {r.mean, r.median, r.sd, r.mad, r.q5, r.q95, r.rhat,
                     r.ess_bulk, r.ess_tail}) {
      out << ',' << full(v);
    }
    out << '\n';
  }
}

void write_acf_csv(const std::filesystem::path& path,
                   const PosteriorDraws& draws, int max_lag) {
  auto out = open_out(path);
  out << "quantity,chain,lag,acf\n";
  const auto& names = quantity_names();
  for (int k = 0; k < col::kCount; ++k) {
    const ChainMatrix m = draws.by_chain(k);
    for (int c = 0; c < draws.n_chains; ++c) {
      const auto acf = autocorrelation(m.col(c), max_lag);
      for (int lag = 1; lag <= max_lag; ++lag) {
        out << names[static_cast<std::size_t>(k)] << ',' << c << ',' << lag
            << ',' << full(acf[static_cast<std::size_t>(lag - 1)]) << '\n';
      }
    }
  }
}

void write_edf_csv(const std::filesystem::path& path,
                   const std::vector<EdfPoint>& curve) {
  auto out = open_out(path);
  out << "time,empirical,fitted\n";
  for (const auto& p : curve) {
    out << full(p.time) << ',' << full(p.empirical) << ',' << full(p.fitted)
        << '\n';
  }
}

void write_grid_csv(const std::filesystem::path& path,
                    const std::vector<CriterionPoint>& grid) {
  auto out = open_out(path);
  out << "x1,tau,c1_raw,c2_raw,n_used,n_discarded,n_refitted\n";
  for (const auto& g : grid) {
    out << full(g.x1) << ',' << full(g.tau) << ',' << full(g.c1_raw) << ','
        << full(g.c2_raw) << ',' << g.n_used << ',' << g.n_discarded << ','
        << g.n_refitted << '\n';
  }
}

void write_fine_csv(const std::filesystem::path& path,
                    const std::vector<FinePoint>& fine) {
  auto out = open_out(path);
  out << "x1,tau,c1_smoothed,c2_smoothed\n";
  for (const auto& f : fine) {
    out << full(f.x1) << ',' << full(f.tau) << ',' << full(f.c1) << ','
        << full(f.c2) << '\n';
  }
}

void write_optimum_csv(const std::filesystem::path& path,
                       const CriterionSurface& surface) {
  auto out = open_out(path);
  out << "criterion,x1,tau,value\n";
  const char* names[] = {"C1", "C2"};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& o = surface.optimum[k];
    out << names[k] << ',' << full(o.x1) << ',' << full(o.tau) << ','
        << full(o.value) << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace ssalt::io
