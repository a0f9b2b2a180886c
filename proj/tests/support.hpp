#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "patronage/data_model.hpp"
#include "patronage/error.hpp"
#include "patronage/ingest.hpp"

namespace test {

using patronage::Dataset;
using patronage::Gender;
using patronage::JobSpell;
using patronage::PoliticianId;
using patronage::Politician;
using patronage::PromotionEvent;
using patronage::Rank;
using patronage::YearMonth;

inline YearMonth ym(const char* s) { return *YearMonth::parse(s); }

inline PoliticianId pid(std::uint64_t v) { return PoliticianId{v}; }

/// Code of the patronage::Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<patronage::ErrorCode> thrown_code(F&& f) {
  try {
    f();
  } catch (const patronage::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Small in-memory dataset under construction.
struct Fixture {
  Dataset ds;

  Fixture& person(std::uint64_t id, const std::string& city, const std::string& province = "P1",
                  Gender g = Gender::Male, int birth = 1950, int join = 1975,
                  std::optional<int> retire = std::nullopt) {
    Politician p;
    p.id = pid(id);
    p.name = "N" + std::to_string(id);
    p.gender = g;
    p.birth_year = birth;
    p.party_join_year = join;
    p.home_city = city;
    p.home_province = province;
    p.retirement_year = retire;
    ds.politicians[p.id] = p;
    return *this;
  }

  Fixture& spell(std::uint64_t id, const char* start, const char* end, const std::string& city,
                 int rank, const std::string& org = "", const std::string& province = "P1") {
    JobSpell s;
    s.politician_id = pid(id);
    s.start = ym(start);
    s.end = ym(end);
    s.province = province;
    s.municipality = city;
    s.organization = org.empty() ? city + "/party" : org;
    s.rank = Rank(rank);
    ds.spells.push_back(s);
    return *this;
  }

  Fixture& promotion(std::uint64_t promotee, std::initializer_list<std::uint64_t> promoters,
                     const char* date) {
    PromotionEvent e;
    e.promotee = pid(promotee);
    for (auto p : promoters) e.promoters.push_back(pid(p));
    e.date = ym(date);
    ds.promotions.push_back(e);
    return *this;
  }
};

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("patronage-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace test
