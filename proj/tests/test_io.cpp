#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "plmix/serialize.hpp"

using namespace plmix;

namespace {

Dataset round_trip(const Dataset& d, InputFormat f) {
  std::stringstream ss;
  write_dataset(ss, d, f);
  return read_dataset(ss, f, d.num_items());
}

}  // namespace

TEST(Csv, HeaderIsOptional) {
  std::istringstream with("rank1,rank2,rank3\n2,1,0\n3,0,0\n");
  std::istringstream without("2,1,0\n3,0,0\n");
  const IntMatrix a = read_int_csv(with), b = read_int_csv(without);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, (IntMatrix{{2, 1, 0}, {3, 0, 0}}));
}

TEST(Csv, RaggedRowsRejected) {
  std::istringstream in("1,2,3\n1,2\n");
  EXPECT_THROW(read_int_csv(in), ValidationError);
  std::istringstream junk("1,2,3\n1,x,3\n");
  EXPECT_THROW(read_int_csv(junk), ValidationError);
}

TEST(Csv, NumItemsPadsColumns) {
  const IntMatrix m{{2, 1}, {1, 0}};
  const IntMatrix padded = with_num_items(m, 4);
  EXPECT_EQ(padded, (IntMatrix{{2, 1, 0, 0}, {1, 0, 0, 0}}));
  EXPECT_EQ(with_num_items(m, std::nullopt), m);
  EXPECT_THROW(with_num_items(m, 1), ValidationError);
}

TEST(Csv, OrderingAndRankingFilesAgree) {
  std::ostringstream ord_text, rank_text;
  const Dataset d(fixtures::dublin_west_head());
  write_dataset(ord_text, d, InputFormat::csv_ordering);
  write_dataset(rank_text, d, InputFormat::csv_ranking);
  std::istringstream rin(rank_text.str());
  EXPECT_EQ(read_int_csv(rin), fixtures::dublin_west_head_rankings());
  std::istringstream oin(ord_text.str()), rin2(rank_text.str());
  EXPECT_EQ(read_dataset(oin, InputFormat::csv_ordering), read_dataset(rin2, InputFormat::csv_ranking));
}

TEST(RoundTrip, AllFormatsExact) {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 200; ++rep) {
    const int K = 2 + rep % 9;
    const Dataset d(fixtures::random_partial_orderings(1 + rep % 30, K, rng));
    for (auto f : {InputFormat::csv_ordering, InputFormat::csv_ranking, InputFormat::preflib})
      ASSERT_EQ(round_trip(d, f), d) << "K = " << K << ", format " << static_cast<int>(f);
  }
}

TEST(RoundTrip, FrequencyTable) {
  const FreqTable t = fixtures::german_freq();
  std::stringstream ss;
  write_freq_csv(ss, t);
  const FreqTable back = read_freq_csv(ss);
  EXPECT_EQ(back.sequences, t.sequences);
  EXPECT_EQ(back.counts, t.counts);
}

TEST(Preflib, CountExpansionAndCompletion) {
  const Dataset d = parse_preflib("# NUMBER ALTERNATIVES: 3\n3: 2,1\n", std::nullopt);
  ASSERT_EQ(d.size(), 3u);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_EQ(std::vector<int>(d.row(s).begin(), d.row(s).end()), (std::vector<int>{2, 1, 3}));
    EXPECT_EQ(d.nranked(s), 3);
  }
  const Dataset one = parse_preflib("1: 1,2,3\n", 3);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one.complete());
}

TEST(Preflib, TotalRowsEqualSumOfCounts) {
  const Dataset d = parse_preflib(
      "# FILE NAME: x.soi\n# NUMBER ALTERNATIVES: 5\n# NUMBER VOTERS: 16\n"
      "7: 1,2\n4: 5,3,1,2,4\n2: 3\n3: 4,1,2\n");
  EXPECT_EQ(d.size(), 16u);
  EXPECT_EQ(d.num_items(), 5);
  EXPECT_EQ(d.nranked(7), 5);
  EXPECT_EQ(d.nranked(11), 1);
}

TEST(Preflib, LegacyLayout) {
  const Dataset d = parse_preflib("3\n1,Alice\n2,Bob\n3,Carol\n5,5,3\n2,3,1\n3,1\n");
  ASSERT_EQ(d.size(), 5u);
  EXPECT_EQ(std::vector<int>(d.row(0).begin(), d.row(0).end()), (std::vector<int>{3, 1, 2}));
  EXPECT_EQ(d.nranked(4), 1);
}

TEST(Preflib, ErrorsNameTheLine) {
  auto message = [](std::string_view text) {
    try {
      parse_preflib(text);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("# NUMBER ALTERNATIVES: 3\n1: 1,2\n2: 1,1\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("# NUMBER ALTERNATIVES: 3\n1: 4\n").find("item id 4"), std::string::npos);
  EXPECT_NE(message("# NUMBER ALTERNATIVES: 3\nx: 1\n").find("malformed count"), std::string::npos);
  EXPECT_NE(message("# NUMBER ALTERNATIVES: 3\n0: 1\n").find("malformed count"), std::string::npos);
  EXPECT_NE(message("# NUMBER ALTERNATIVES: 3\n1: {1,2},3\n").find("tied"), std::string::npos);
}

TEST(Chain, CsvRoundTripIsExact) {
  std::mt19937_64 rng(72);
  const Dataset d(fixtures::random_partial_orderings(30, 4, rng));
  const GibbsChain c = gibbs_run(d, 2, Hyperparams::flat(2, 4), std::nullopt, {60, 10}, 5);
  std::stringstream ss;
  write_chain_csv(ss, c);
  const GibbsChain back = read_chain_csv(ss);
  EXPECT_EQ(back.num_components, c.num_components);
  EXPECT_EQ(back.num_items, c.num_items);
  EXPECT_EQ(back.P, c.P);
  EXPECT_EQ(back.W, c.W);
  EXPECT_EQ(back.log_lik, c.log_lik);
  EXPECT_EQ(back.deviance, c.deviance);
}

TEST(Chain, BadHeaderRejected) {
  std::istringstream in("p_1_1,p_1_2,w_1,loglik\n1,1,1,0\n");
  EXPECT_THROW(read_chain_csv(in), ValidationError);
}

TEST(MapJson, RawParametersRoundTripExactly) {
  std::mt19937_64 rng(73);
  const Dataset d(fixtures::random_partial_orderings(40, 5, rng));
  Rng r = make_stream(9);
  const MapFit fit = fit_map(d, 2, Hyperparams::flat(2, 5), std::nullopt, {}, r);
  const Json j = Json::parse(map_fit_json(fit).dump());
  const MixtureParams back = map_params_from_json(j);
  EXPECT_EQ(back.supports, fit.params.supports);
  EXPECT_EQ(back.weights, fit.params.weights);
  EXPECT_EQ(map_class_from_json(j), fit.class_map);
  EXPECT_TRUE(j.at("bic").is_number());
}

TEST(MapJson, MalformedDocumentIsValidationError) {
  EXPECT_THROW(map_params_from_json(Json::parse(R"({"P_raw": [[1, 2]]})")), ValidationError);
  EXPECT_THROW(map_params_from_json(Json::parse(R"({"P_raw": [[1, -2]], "W_raw": [1]})")),
               ValidationError);
  std::istringstream broken("{not json");
  EXPECT_THROW(read_json(broken, "test"), IoError);
}
