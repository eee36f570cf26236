#include <gtest/gtest.h>

#include "json.hpp"

#include <sstream>

#include "qdcca/config.hpp"
#include "qdcca/dataset_io.hpp"
#include "qdcca/report.hpp"

using namespace qdcca;

namespace {

std::map<std::string, std::string> parse(const std::string &text) {
    std::istringstream in(text);
    return parse_config_text(in);
}

PairedDataset parse_csv(const std::string &text) {
    std::istringstream in(text);
    return parse_dataset(in);
}

std::size_t error_line(const std::string &text) {
    try {
        parse_csv(text);
    } catch (const DatasetFormatError &ex) {
        return ex.line();
    }
    return 9999;
}

}  // namespace

TEST(Config, SectionsAndComments) {
    const auto kv = parse("# top\n[tolerances]\neps4 = 0.1 ; trailing\n\n[run]\nseed=7\n");
    EXPECT_EQ(kv.at("tolerances.eps4"), "0.1");
    EXPECT_EQ(kv.at("run.seed"), "7");
    EXPECT_EQ(kv.size(), 2u);
}

TEST(Config, ParseErrors) {
    EXPECT_THROW(parse("[run\nseed = 1\n"), std::invalid_argument);
    EXPECT_THROW(parse("[run]\nseed\n"), std::invalid_argument);
    EXPECT_THROW(parse("[run]\nbogus = 1\n"), std::invalid_argument);
    EXPECT_THROW(parse("[tolerances]\nseed = 1\n"), std::invalid_argument);
}

TEST(Config, Precedence) {
    const std::map<std::string, std::string> file{{"tolerances.eps4", "0.1"}, {"run.seed", "1"}, {"simulator.t_bits", "5"}};
    const auto env = environment_settings([](const char *name) -> const char * {
        const std::string n(name);
        if (n == "QDCCA_EPS4") return "0.2";
        if (n == "QDCCA_SEED") return "2";
        return nullptr;
    });
    EXPECT_EQ(env.size(), 2u);
    const std::map<std::string, std::string> flags{{"seed", "3"}};
    const auto config = resolve_config(file, env, flags);
    EXPECT_DOUBLE_EQ(config.eps4, 0.2);
    EXPECT_EQ(config.seed, 3u);
    EXPECT_EQ(config.t_bits, 5u);
    EXPECT_DOUBLE_EQ(config.delta1, 0.05);
}

TEST(Config, BadValues) {
    RunConfig c;
    EXPECT_THROW(apply_setting(c, "eps4", "abc"), std::invalid_argument);
    EXPECT_THROW(apply_setting(c, "seed", "-1"), std::invalid_argument);
    EXPECT_THROW(apply_setting(c, "table", "maybe"), std::invalid_argument);
    EXPECT_THROW(apply_setting(c, "nope", "1"), std::invalid_argument);
    c.seed = 1;
    c.t_bits = 11;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.t_bits = 7;
    c.delta1 = 0.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, MissingSeed) {
    RunConfig c;
    EXPECT_THROW(c.require_seed(), std::invalid_argument);
}

TEST(Config, TextRoundTrip) {
    RunConfig c;
    apply_setting(c, "run.seed", "11");
    apply_setting(c, "dataset.classes", "3,2,4");
    apply_setting(c, "tolerances.eps3", "0.01");
    apply_setting(c, "run.exact_trace_ratio", "true");
    const auto again = resolve_config(parse(to_config_text(c)), {}, {});
    EXPECT_EQ(to_config_text(again), to_config_text(c));
    EXPECT_EQ(again.generator.class_sizes, (std::vector<std::size_t>{3, 2, 4}));
    EXPECT_TRUE(again.exact_trace_ratio);
}

TEST(DatasetIo, RoundTrip) {
    GeneratorSpec spec;
    spec.p = 2;
    spec.q = 3;
    spec.class_sizes = {3, 1, 2};
    spec.seed = 4;
    const auto data = generate_dataset(spec);
    const auto back = parse_csv(dataset_to_csv(data));
    EXPECT_EQ(back.class_sizes(), data.class_sizes());
    EXPECT_EQ(back.a(), data.a());
    EXPECT_EQ(back.b(), data.b());
}

TEST(DatasetIo, ParsesHeaderAndRows) {
    const auto data = parse_csv("# p=1 q=1 classes=2,2\n1,2,3,4\n1,1,2,2\n");
    EXPECT_EQ(data.n(), 4u);
    EXPECT_EQ(data.classes(), 2u);
    EXPECT_DOUBLE_EQ(data.a()(0, 2), 3);
}

TEST(DatasetIo, LoadsReferenceFile) {
    const auto data = load_dataset(QDCCA_TEST_DATA "/tiny.csv");
    EXPECT_EQ(data.class_sizes(), (std::vector<std::size_t>{2, 2}));
    EXPECT_DOUBLE_EQ(data.b()(0, 3), 2);
    EXPECT_THROW(load_dataset(QDCCA_TEST_DATA "/missing.csv"), std::runtime_error);
}

TEST(DatasetIo, Rejects) {
    EXPECT_EQ(error_line(""), 0u);
    EXPECT_EQ(error_line("p=1 q=1 classes=2\n1,2\n3,4\n"), 1u);
    EXPECT_EQ(error_line("# p=1 q=1 classes=2,2\n1,2,3,4,5\n1,1,2,2,2\n"), 2u);
    EXPECT_EQ(error_line("# p=1 q=1 classes=2,2\n1,2,3,4\n1,x,2,2\n"), 3u);
    EXPECT_EQ(error_line("# p=1 q=1 classes=2,0\n1,2\n1,2\n"), 1u);
    EXPECT_NE(error_line("# p=1 q=1 classes=2,2\n1,2,3,4\n"), 9999u);
}

TEST(Generator, Deterministic) {
    GeneratorSpec spec;
    spec.p = 3;
    spec.q = 2;
    spec.class_sizes = {4, 4, 4};
    spec.seed = 9;
    EXPECT_EQ(dataset_to_csv(generate_dataset(spec)), dataset_to_csv(generate_dataset(spec)));
    const auto data = generate_dataset(spec);
    EXPECT_LE(data.max_abs_entry(), spec.value_range);
    spec.seed = 10;
    EXPECT_NE(dataset_to_csv(generate_dataset(spec)), dataset_to_csv(data));
}

TEST(Generator, DensityModes) {
    GeneratorSpec spec;
    spec.p = 2;
    spec.q = 2;
    spec.class_sizes = {10, 10};
    spec.m0 = 0.2;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        spec.seed = seed;
        spec.density = DensityMode::violate;
        EXPECT_GE(fraction_below(generate_dataset(spec), spec.m0), 0.6);
        spec.density = DensityMode::satisfy;
        EXPECT_LE(fraction_below(generate_dataset(spec), spec.m0), 0.5);
    }
    EXPECT_THROW(parse_density_mode("dense"), std::invalid_argument);
    EXPECT_EQ(parse_density_mode(to_string(DensityMode::violate)), DensityMode::violate);
}

TEST(Report, DeterministicAndQuantumOnly) {
    RunConfig c;
    c.seed = 5;
    c.generator.p = 1;
    c.generator.q = 1;
    c.generator.class_sizes = {2, 2};
    const auto r1 = run_compare(c);
    const auto r2 = run_compare(c);
    EXPECT_EQ(to_json(r1), to_json(r2));
    const auto full = nlohmann::json::parse(to_json(r1));
    EXPECT_TRUE(full.contains("checks"));
    const auto q = nlohmann::json::parse(quantum_json(r1));
    EXPECT_FALSE(q.contains("checks"));
    EXPECT_FALSE(q.contains("status"));
    EXPECT_FALSE(to_table(r1).empty());
}
