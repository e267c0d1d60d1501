#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "autochart/catalog.hpp"
#include "autochart/error.hpp"

using namespace autochart;
using namespace autochart::catalog;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("autochart_cat_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kDict =
    "# autochart-catalog-dictionary v1\n"
    "record,id,name,unit,value_kind,entity_kind\n"
    "indicator,lit,Literacy rate,percent,percentage,\n"
    "indicator,pop,Population,people,positive-integer,\n"
    "entity,sg,Singapore,,,country\n"
    "entity,fr,France,,,country\n";

}  // namespace

TEST(LoadCatalog, ThreeRows) {
  TempDir dir;
  write_file(dir.path() / "c.dict.csv", kDict);
  write_file(dir.path() / "c.csv",
             "# autochart-catalog-data v1\n"
             "indicator_id,entity_id,year,value\n"
             "lit,sg,1990,88.5\n"
             "lit,sg,1991,89\n"
             "pop,fr,2000,60000000\n");
  auto cat = load_catalog(dir.path() / "c.csv");
  EXPECT_EQ(cat.observations().size(), 3u);
  EXPECT_EQ(cat.value(0, 0, 1991), 89.0);
  EXPECT_FALSE(cat.value(0, 1, 1991).has_value());
  auto s = stats(cat);
  EXPECT_EQ(s.indicators, 2u);
  EXPECT_EQ(s.entities, 2u);
  EXPECT_EQ(s.first_year, 1990);
  EXPECT_EQ(s.last_year, 2000);
}

TEST(LoadCatalog, PercentageOutOfRangeNamesTheLine) {
  TempDir dir;
  write_file(dir.path() / "c.dict.csv", kDict);
  write_file(dir.path() / "c.csv",
             "# autochart-catalog-data v1\n"
             "indicator_id,entity_id,year,value\n"
             "lit,sg,1990,88.5\n"
             "lit,sg,1991,123.0\n");
  try {
    load_catalog(dir.path() / "c.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOutOfRange);
    EXPECT_NE(std::string(e.what()).find("c.csv:4"), std::string::npos) << e.what();
  }
}

TEST(LoadCatalog, MalformedAndMissing) {
  TempDir dir;
  write_file(dir.path() / "c.dict.csv", kDict);
  write_file(dir.path() / "c.csv",
             "# autochart-catalog-data v1\n"
             "indicator_id,entity_id,year,value\n"
             "lit,sg,1990\n");
  try {
    load_catalog(dir.path() / "c.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMalformed);
  }
  try {
    load_catalog(dir.path() / "absent.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(LoadCatalog, YearOutsideRange) {
  TempDir dir;
  write_file(dir.path() / "c.dict.csv", kDict);
  write_file(dir.path() / "c.csv",
             "# autochart-catalog-data v1\n"
             "indicator_id,entity_id,year,value\n"
             "lit,sg,1949,50\n");
  EXPECT_THROW(load_catalog(dir.path() / "c.csv"), Error);
}

TEST(SynthCatalog, Deterministic) {
  EXPECT_EQ(synth_catalog(7, 2, 2), synth_catalog(7, 2, 2));
  EXPECT_FALSE(synth_catalog(7, 2, 2) == synth_catalog(8, 2, 2));
}

TEST(SynthCatalog, FullScaleCensus) {
  auto s = stats(synth_catalog(7, 346, 76));
  EXPECT_EQ(s.indicators, 346u);
  EXPECT_EQ(s.entities, 76u);
  EXPECT_GE(s.first_year, kFirstYear);
  EXPECT_LE(s.last_year, kLastYear);
}

TEST(SynthCatalog, ZeroCountsRejected) {
  EXPECT_THROW(synth_catalog(1, 0, 5), Error);
  EXPECT_THROW(synth_catalog(1, 5, 0), Error);
}

TEST(SynthCatalog, ValuesRespectBounds) {
  auto cat = synth_catalog(3, 40, 20);
  for (const auto& [key, v] : cat.observations()) {
    auto b = bounds_of(cat.indicators()[key.indicator].value_kind);
    ASSERT_GE(v, b.lo);
    ASSERT_LE(v, b.hi);
  }
}

TEST(WriteCatalog, RoundTrip) {
  TempDir dir;
  auto cat = synth_catalog(11, 5, 6);
  write_catalog(cat, dir.path() / "syn.csv");
  EXPECT_TRUE(fs::exists(dir.path() / "syn.dict.csv"));
  EXPECT_EQ(load_catalog(dir.path() / "syn.csv"), cat);
}

TEST(SampleSeries, OnlyRunAvailable) {
  std::map<ObservationKey, double> obs;
  for (int y = 1990; y <= 1997; ++y) obs[{0, 0, y}] = 10.0 + y - 1990;
  Catalog cat({{"i", "Exports", "US dollars", ValueKind::kFloat}}, {{"e", "Chile", "country"}},
              obs);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    auto s = sample_series(cat, true, 1, rng);
    ASSERT_EQ(s.size(), 1u);
    ASSERT_GE(s[0].size(), 2u);
    ASSERT_LE(s[0].size(), 8u);
    EXPECT_TRUE(labels_are_ordered_years(s[0].x_labels));
    EXPECT_GE(std::stoi(s[0].x_labels.front()), 1990);
    EXPECT_LE(std::stoi(s[0].x_labels.back()), 1997);
  }
}

TEST(SampleSeries, NoCoverage) {
  std::map<ObservationKey, double> obs;
  obs[{0, 0, 1990}] = 1.0;
  Catalog cat({{"i", "Exports", "US dollars", ValueKind::kFloat}}, {{"e", "Chile", "country"}},
              obs);
  Rng rng(1);
  try {
    sample_series(cat, true, 1, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientCoverage);
  }
}

TEST(SampleSeries, PairsShareLabelsAndUnit) {
  auto cat = synth_catalog(5, 30, 20);
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    bool temporal = i % 2 == 0;
    auto s = sample_series(cat, temporal, 2, rng);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].x_labels, s[1].x_labels);
    EXPECT_EQ(s[0].y_unit, s[1].y_unit);
    EXPECT_NE(s[0].series_name, s[1].series_name);
    EXPECT_EQ(s[0].temporal, temporal);
    EXPECT_NO_THROW(s[0].validate());
  }
}

TEST(SampleSeries, LengthDistributionCoversTwoToEight) {
  auto cat = synth_catalog(5, 60, 40);
  Rng rng(12);
  std::set<std::size_t> temporal_lengths, categorical_lengths;
  for (int i = 0; i < 1000; ++i) {
    temporal_lengths.insert(sample_series(cat, true, 1, rng)[0].size());
    categorical_lengths.insert(sample_series(cat, false, 1, rng)[0].size());
  }
  EXPECT_EQ(temporal_lengths, (std::set<std::size_t>{2, 3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(categorical_lengths, (std::set<std::size_t>{2, 3, 4, 5, 6, 7, 8}));
}

TEST(SampleSeries, BadArity) {
  auto cat = synth_catalog(5, 3, 3);
  Rng rng(1);
  EXPECT_THROW(sample_series(cat, true, 3, rng), Error);
}

namespace {

DataSeries sample_temporal(ValueKind kind) {
  DataSeries s;
  s.series_name = "Chile";
  s.x_labels = {"2000", "2001", "2002", "2003", "2004", "2005"};
  s.y_values = {95, 40, 70, 99, 12, 55};
  s.y_unit = "percent";
  s.temporal = true;
  s.indicator_name = "Literacy rate";
  s.entity_kind = "country";
  s.value_kind = kind;
  return s;
}

}  // namespace

TEST(Perturb, PlateauIsFlat) {
  auto base = sample_temporal(ValueKind::kFloat);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    auto out = perturb_to_trend(base, trend::default_preset(trend::TrendClass::kPlateau, 6), rng);
    auto [lo, hi] = std::minmax_element(out.y_values.begin(), out.y_values.end());
    double mean = 0;
    for (double v : out.y_values) mean += v / out.y_values.size();
    EXPECT_LT((*hi - *lo) / mean, 0.05);
    EXPECT_EQ(out.x_labels, base.x_labels);
    EXPECT_EQ(out.series_name, base.series_name);
  }
}

TEST(Perturb, PercentagesStayBounded) {
  auto base = sample_temporal(ValueKind::kPercentage);
  Rng rng(4);
  for (auto c : trend::kAllTrendClasses) {
    for (int i = 0; i < 50; ++i) {
      auto out = perturb_to_trend(base, trend::default_preset(c, 6), rng);
      for (double v : out.y_values) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 100.0);
      }
    }
  }
}

TEST(Perturb, ClassifiesAsRequested) {
  auto base = sample_temporal(ValueKind::kFloat);
  Rng rng(8);
  for (auto c : trend::kAllTrendClasses) {
    auto out = perturb_to_trend(base, trend::default_preset(c, 6), rng);
    EXPECT_EQ(trend::classify_trend(out.y_values), c) << trend::to_string(c);
  }
}

TEST(DataSeriesValidate, Rejects) {
  auto s = sample_temporal(ValueKind::kFloat);
  s.x_labels.pop_back();
  EXPECT_THROW(s.validate(), Error);
  s = sample_temporal(ValueKind::kFloat);
  s.x_labels[2] = "1999";
  EXPECT_THROW(s.validate(), Error);
  s = sample_temporal(ValueKind::kPercentage);
  s.y_values[0] = 101;
  EXPECT_THROW(s.validate(), Error);
}
