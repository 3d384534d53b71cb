#include <gtest/gtest.h>

#include <sstream>

#include <sspert/config.hpp>

using namespace sspert;

TEST(Config, ParsesAndOverridesOnlyGivenKeys) {
    std::istringstream in("# base case with a spread shock\n"
                          "m = 0.72\n"
                          "  s0=0.05   # trailing comment\n"
                          "\n"
                          "sigma2 = 3e-4\n");
    ParamValues v;
    v.l0 = 0.2;
    read_param_values(in, v);
    EXPECT_EQ(v.m, 0.72);
    EXPECT_EQ(v.s0, 0.05);
    EXPECT_EQ(v.sigma2, 3e-4);
    EXPECT_EQ(v.l0, 0.2);
    EXPECT_EQ(v.mu, -0.01);
}

TEST(Config, RejectsUnknownDuplicateAndMalformed) {
    auto parse = [](const char* text) {
        std::istringstream in(text);
        ParamValues v;
        read_param_values(in, v);
    };
    EXPECT_THROW(parse("beta = 1\n"), ValidationError);
    EXPECT_THROW(parse("M = 1\n"), ValidationError);
    EXPECT_THROW(parse("m = 1\nm = 2\n"), ValidationError);
    EXPECT_THROW(parse("m 1\n"), ValidationError);
    EXPECT_THROW(parse("m = one\n"), ValidationError);
    EXPECT_THROW(parse("m = 1.0x\n"), ValidationError);
    EXPECT_NO_THROW(parse("# only a comment\n\n"));
}

TEST(Config, MissingFile) {
    EXPECT_THROW(load_param_file("/nonexistent/params.txt"), ValidationError);
}

TEST(Config, ValuesBuildValidatedObjects) {
    ParamValues v;
    v.m = -1.0;
    EXPECT_THROW(v.model(), ValidationError);
    v = {};
    v.l0 = -0.1;
    EXPECT_THROW(v.state(), ValidationError);
}
