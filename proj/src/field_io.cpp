#include "bipdo/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace bipdo {

namespace {

constexpr char kMagic[8] = {'B', 'P', 'D', 'O', 'F', 'L', 'D', '1'};

static_assert(std::endian::native == std::endian::little, "field I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("field file truncated");
  return v;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace

void write_field(std::ostream& os, const SampledField& f) {
  os.write(kMagic, 8);
  put<std::uint32_t>(os, f.grid.n1);
  put<std::uint32_t>(os, f.grid.n2);
  put<std::uint32_t>(os, f.grid.N);
  put<std::uint32_t>(os, 0);
  put<double>(os, f.grid.L);
  for (const auto& v : f.values) {
    put<float>(os, static_cast<float>(v.real()));
    put<float>(os, static_cast<float>(v.imag()));
  }
  if (!os) throw std::runtime_error("field write failed");
}

SampledField read_field(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("not a field file (bad magic)");
  auto n1 = get<std::uint32_t>(is);
  auto n2 = get<std::uint32_t>(is);
  auto N = get<std::uint32_t>(is);
  get<std::uint32_t>(is);
  auto L = get<double>(is);
  GridSpec g = make_grid(static_cast<int>(n1), static_cast<int>(n2), static_cast<int>(N), L);
  SampledField f(g);
  for (auto& v : f.values) {
    float re = get<float>(is), im = get<float>(is);
    if (!std::isfinite(re) || !std::isfinite(im)) throw std::runtime_error("field file has non-finite values");
    v = cplx(re, im);
  }
  return f;
}

std::string field_to_json(const SampledField& f) {
  nlohmann::json j;
  j["n1"] = f.grid.n1;
  j["n2"] = f.grid.n2;
  j["N"] = f.grid.N;
  j["L"] = f.grid.L;
  std::vector<double> re, im;
  re.reserve(f.size());
  im.reserve(f.size());
  for (const auto& v : f.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

SampledField field_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  GridSpec g = make_grid(j.at("n1").get<int>(), j.at("n2").get<int>(), j.at("N").get<int>(),
                         j.at("L").get<double>());
  auto re = j.at("re").get<std::vector<double>>();
  auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
  if (re.size() != g.size() || im.size() != g.size())
    throw std::runtime_error("field JSON: value count does not match grid");
  SampledField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = cplx(re[i], im[i]);
  return f;
}

void save_field(const std::string& path, const SampledField& f) {
  if (ends_with(path, ".json")) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << field_to_json(f) << "\n";
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_field(os, f);
}

SampledField load_field(const std::string& path) {
  if (ends_with(path, ".json")) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return field_from_json(text);
  }
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field(is);
}

}  // namespace bipdo
