#include <filesystem>

#include "doctest.h"
#include "generators.hpp"
#include "serialize.hpp"

using namespace mixgbn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mixgbn_serialize_" + name);
  fs::remove_all(p);
  return p;
}

PosteriorSample small_sample() {
  RngStream rng(1);
  const auto d = gen::data(rng, 9, 3);
  ChainConfig c;
  c.hp = Hyperparameters::defaults(3);
  c.hp.lambda = 2.5;
  c.total_iters = 200;
  c.thin = 10;
  c.init_components = 3;
  c.max_fanin = 2;
  c.seed = 42;
  return run_chain(d, c);
}

}  // namespace

TEST_CASE("matrix and vector json round trip") {
  RngStream rng(2);
  const Matrix m = gen::spd(rng, 4);
  CHECK(matrix_from_json(matrix_to_json(m)) == m);
  const Vector v = gen::normal_vector(rng, 5);
  CHECK(vector_from_json(vector_to_json(v)) == v);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1,2],[3]]")), InvalidArgument);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("{}")), InvalidArgument);
}

TEST_CASE("hyperparameters json") {
  auto hp = Hyperparameters::defaults(3);
  hp.alpha_mu = 2.0;
  hp.lambda = 0.5;
  hp.t_dagger *= 3.0;
  const auto back = hyperparameters_from_json(hyperparameters_to_json(hp), 3);
  CHECK(back.t_dagger == hp.t_dagger);
  CHECK(back.nu == hp.nu);
  CHECK(back.alpha_w == hp.alpha_w);
  CHECK(back.alpha_mu == 2.0);
  CHECK(back.lambda == 0.5);

  // missing keys take the defaults for n
  const auto partial = hyperparameters_from_json(Json::parse(R"({"lambda": 3})"), 4);
  const auto def = Hyperparameters::defaults(4);
  CHECK(partial.lambda == 3.0);
  CHECK(partial.alpha_w == def.alpha_w);
  CHECK(partial.t_dagger == def.t_dagger);
  CHECK(hyperparameters_from_json(Json(), 2).alpha_w == Hyperparameters::defaults(2).alpha_w);

  CHECK_THROWS_AS(hyperparameters_from_json(Json::parse(R"({"alpha_w": 1})"), 3), InvalidArgument);
  CHECK_THROWS_AS(hyperparameters_from_json(Json::parse(R"({"nu": [0, 0]})"), 3), InvalidArgument);
}

TEST_CASE("sample files round trip") {
  const auto s = small_sample();
  const auto dir = scratch_dir("sample");
  const std::string path = (dir / "run" / "samples.jsonl").string();
  write_sample(path, s, 1);
  CHECK(fs::exists(dir / "run" / "samples.summary.json"));
  CHECK(fs::exists(dir / "run" / "samples.trace.csv"));
  CHECK_FALSE(fs::exists(dir / "run" / "samples.jsonl.tmp"));

  const auto back = read_sample(path);
  CHECK(back.n == s.n);
  CHECK(back.m == s.m);
  REQUIRE(back.draws.size() == s.draws.size());
  for (std::size_t i = 0; i < s.draws.size(); ++i) {
    CHECK(back.draws[i].iter == s.draws[i].iter);
    CHECK(back.draws[i].log_score == s.draws[i].log_score);
    CHECK(back.draws[i].g == s.draws[i].g);
    CHECK(back.draws[i].z.labels() == s.draws[i].z.labels());
  }
  CHECK(back.config.seed == 42);
  CHECK(back.config.init_components == 3);
  CHECK(back.config.max_fanin == 2);
  CHECK(back.config.hp.lambda == 2.5);
  CHECK(back.stats.structure_proposals == s.stats.structure_proposals);
  // writing the read-back sample reproduces the bytes
  CHECK(format_sample_jsonl(back) == format_sample_jsonl(s));
  CHECK(sample_summary(back).at("config") == sample_summary(s).at("config"));
  fs::remove_all(dir);
}

TEST_CASE("draw lines use 1-based nodes and labels") {
  PosteriorSample s;
  s.n = 3;
  s.m = 3;
  s.config.hp = Hyperparameters::defaults(3);
  Draw d;
  d.iter = 7;
  d.log_score = -1.5;
  d.g = Dag(3);
  d.g.add_edge(0, 2);
  d.z = Assignment::from_labels({0, 1, 0});
  s.draws.push_back(d);
  const auto line = Json::parse(format_sample_jsonl(s));
  CHECK(line.at("iter") == 7);
  CHECK(line.at("edges") == Json::parse("[[1,3]]"));
  CHECK(line.at("z") == Json::parse("[1,2,1]"));
}

TEST_CASE("malformed sample input is rejected") {
  const auto s = small_sample();
  const Json summary = sample_summary(s);
  CHECK_THROWS_AS(parse_sample("{not json}\n", summary), InvalidArgument);
  CHECK_THROWS_AS(parse_sample(R"({"iter":1,"log_score":0,"edges":[],"z":[1,1]})", summary), InvalidArgument);
  CHECK_THROWS_AS(parse_sample(R"({"iter":1,"log_score":0,"edges":[[1,9]],"z":[1,1,1,1,1,1,1,1,1]})", summary),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_sample(R"({"iter":1,"log_score":0,"edges":[[1,2],[2,1]],"z":[1,1,1,1,1,1,1,1,1]})", summary),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_sample("", Json::parse("{}")), InvalidArgument);
  CHECK(parse_sample("\n\n", summary).draws.empty());
  CHECK_THROWS_AS(read_sample("/nonexistent/dir/samples.jsonl"), IoError);
}

TEST_CASE("ground truth round trip") {
  SimConfig c;
  c.n = 6;
  c.m = 30;
  c.k = 3;
  c.expected_edges = 5.0;
  const auto [d, t] = simulate_dataset(c);
  const Json j = truth_to_json(t);
  const auto back = truth_from_json(Json::parse(j.dump()));
  CHECK(back.dag == t.dag);
  CHECK(back.cpdag == t.cpdag);
  CHECK(back.coef == t.coef);
  CHECK(back.noise == t.noise);
  CHECK(back.sigma == t.sigma);
  CHECK(back.z.labels() == t.z.labels());
  REQUIRE(back.means.size() == t.means.size());
  for (std::size_t k = 0; k < t.means.size(); ++k) CHECK(back.means[k] == t.means[k]);
  CHECK_THROWS_AS(truth_from_json(Json::parse(R"({"n": 2})")), InvalidArgument);
}

TEST_CASE("theta json layout") {
  ThetaDraw th;
  th.model = Model::M1;
  th.weights = {0.4, 0.6};
  th.means = {Vector::Zero(2), Vector::Ones(2)};
  th.covariances = {Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)};
  const Json j = theta_to_json(th);
  CHECK(j.at("K") == 2);
  CHECK(j.at("weights").size() == 2);
  CHECK(j.at("means").size() == 2);
  CHECK(j.at("covariance").size() == 2);
}

TEST_CASE("matrix csv") {
  Matrix m(2, 2);
  m << 1.0, 0.5, 0.25, 0.0;
  const auto csv = format_matrix_csv(m, "X");
  CHECK(csv.rfind("X1,X2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("atomic writes create parents and replace content") {
  const auto dir = scratch_dir("atomic");
  const std::string p = (dir / "a" / "b" / "f.txt").string();
  write_text_atomic(p, "one");
  write_text_atomic(p, "two");
  CHECK(read_text(p) == "two");
  CHECK_THROWS_AS(read_text((dir / "missing").string()), IoError);
  fs::remove_all(dir);
}
