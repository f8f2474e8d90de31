#include "provis/synth.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "provis/error.hpp"
#include "provis/value.hpp"

namespace provis {

namespace {

constexpr std::array<const char*, 50> kStates = {
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "FL", "GA", "HI", "ID", "IL",
    "IN", "IA", "KS", "KY", "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT",
    "NE", "NV", "NH", "NJ", "NM", "NY", "NC", "ND", "OH", "OK", "OR", "PA", "RI",
    "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY"};

constexpr double kLon0 = -125.0, kLon1 = -66.0, kLat0 = 24.0, kLat1 = 50.0;
constexpr int kCols = 10, kRows = 5;

struct Cell {
  double lon0, lat0, lon1, lat1;
};

Cell cell_of(std::size_t s) {
  const double w = (kLon1 - kLon0) / kCols, h = (kLat1 - kLat0) / kRows;
  const double lon = kLon0 + static_cast<double>(s % kCols) * w;
  const double lat = kLat0 + static_cast<double>(s / kCols) * h;
  return {lon, lat, lon + w, lat + h};
}

// std distributions differ between standard libraries; these do not.
struct Rng {
  std::mt19937_64 gen;
  double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return gen() % n; }
};

std::ofstream open(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + p.string());
  return out;
}

std::string fixed(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return format_double(std::round(v * scale) / scale);
}

}  // namespace

void generate(const SynthOptions& o, const std::filesystem::path& dir) {
  if (o.rows == 0) throw Error(ErrorCode::InvalidArgument, "rows must be positive");
  if (o.airlines == 0 || o.airports == 0) {
    throw Error(ErrorCode::InvalidArgument, "need at least one airline and one airport");
  }
  std::filesystem::create_directories(dir);
  Rng rng{std::mt19937_64(o.seed)};

  {
    auto out = open(dir / "shapes.csv");
    out << "state,polygons\n";
    for (std::size_t s = 0; s < kStates.size(); ++s) {
      const auto c = cell_of(s);
      const auto lo0 = format_double(c.lon0), lo1 = format_double(c.lon1);
      const auto la0 = format_double(c.lat0), la1 = format_double(c.lat1);
      out << kStates[s] << ",\"[[[" << lo0 << ',' << la0 << "],[" << lo1 << ',' << la0 << "],[" << lo1 << ','
          << la1 << "],[" << lo0 << ',' << la1 << "],[" << lo0 << ',' << la0 << "]]]\"\n";
    }
  }

  {
    auto out = open(dir / "airlines.csv");
    out << "alid,name,active\n";
    for (std::size_t a = 0; a < o.airlines; ++a) {
      const bool active = a == 0 || rng.unit() < 0.85;
      out << a + 1 << ",Airline " << a + 1 << ',' << (active ? 'Y' : 'N') << '\n';
    }
  }

  {
    auto out = open(dir / "airports.csv");
    out << "apid,name,lat,lon,elevation,city,state,country\n";
    for (std::size_t p = 0; p < o.airports; ++p) {
      const auto s = p < kStates.size() ? p : rng.below(kStates.size());
      const auto c = cell_of(s);
      const double lat = c.lat0 + rng.unit() * (c.lat1 - c.lat0);
      const double lon = c.lon0 + rng.unit() * (c.lon1 - c.lon0);
      const auto city = rng.below(4);
      out << p + 1 << ",Airport " << p + 1 << ',' << fixed(lat, 4) << ',' << fixed(lon, 4) << ','
          << rng.below(2000) << ",City " << kStates[s] << '-' << city << ',' << kStates[s]
          << ",United States\n";
    }
  }

  {
    auto out = open(dir / "ontime.csv");
    out << "fid,y,m,d,h,adelay,ddelay,src_apid,dst_apid,alid\n";
    std::string line;
    for (std::size_t f = 0; f < o.rows; ++f) {
      const auto y = 2019 + rng.below(5);
      const auto m = 1 + rng.below(12);
      const auto d = 1 + rng.below(28);
      const auto h = rng.below(24);
      const double u = rng.unit();
      const auto ddelay = static_cast<std::int64_t>(std::floor(-15.0 + 190.0 * u * u * u));
      const auto adelay = ddelay + static_cast<std::int64_t>(rng.below(31)) - 15;
      const bool missing = rng.unit() < 0.01;
      const auto src = 1 + rng.below(o.airports);
      const auto dst = 1 + rng.below(o.airports);
      const auto al = 1 + rng.below(o.airlines);
      line.clear();
      line += std::to_string(f + 1) + ',' + std::to_string(y) + ',' + std::to_string(m) + ',' +
              std::to_string(d) + ',' + std::to_string(h) + ',';
      if (!missing) line += std::to_string(adelay);
      line += ',';
      if (!missing) line += std::to_string(ddelay);
      line += ',' + std::to_string(src) + ',' + std::to_string(dst) + ',' + std::to_string(al) + '\n';
      out << line;
    }
  }
}

}  // namespace provis
