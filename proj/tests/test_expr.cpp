#include <doctest.h>

#include <cmath>
#include <vector>

#include "linobs/expr.hpp"

using namespace linobs;

TEST_CASE("parse and eval respect precedence and unary minus") {
    CHECK(eval(parse("2+3*4", 1), std::vector<double>{0.0}) == doctest::Approx(14.0));
    CHECK(eval(parse("(2+3)*4", 1), std::vector<double>{0.0}) == doctest::Approx(20.0));
    CHECK(eval(parse("-x1^2", 1), std::vector<double>{3.0}) == doctest::Approx(-9.0));
    CHECK(eval(parse("2-3-4", 1), std::vector<double>{0.0}) == doctest::Approx(-5.0));
    CHECK(eval(parse("12/4/3", 1), std::vector<double>{0.0}) == doctest::Approx(1.0));
    CHECK(eval(parse(" 1 + x1 ", 1), std::vector<double>{0.5}) == doctest::Approx(1.5));
}

TEST_CASE("single-variable expressions accept the alias y") {
    const Expr e = parse("0.2*y/(1+y)-0.3*y", 1);
    CHECK(eval(e, std::vector<double>{0.2}) == doctest::Approx(-0.026666666666666658).epsilon(1e-14));
    CHECK_THROWS_AS(parse("y", 2), ParseError);
}

TEST_CASE("plant component values match hand-computed references") {
    const Expr p1 = parse("exp(0.2*x2/(1+x2))*sqrt(1+x1+x2)-1-0.4*x2-0.5*ln(1+x1+x2)", 2);
    const Expr p2 = parse("0.5*ln(1+x1+x2)+0.4*x2", 2);
    const std::vector<double> a{0.1, 0.1}, b{-0.2, -0.2};
    CHECK(eval(p1, a) == doctest::Approx(-0.015616311797377019).epsilon(1e-14));
    CHECK(eval(p2, a) == doctest::Approx(0.1311607783969774).epsilon(1e-14));
    CHECK(eval(p1, b) == doctest::Approx(0.072231955785741431).epsilon(1e-14));
    CHECK(eval(p2, b) == doctest::Approx(-0.33541281188299527).epsilon(1e-14));
}

TEST_CASE("parse rejects malformed input with a position") {
    CHECK_THROWS_AS(parse("x3", 2), ParseError);
    CHECK_THROWS_AS(parse("1+", 1), ParseError);
    CHECK_THROWS_AS(parse("x1^2.5", 1), ParseError);
    CHECK_THROWS_AS(parse("x1^(-1)", 1), ParseError);
    CHECK_THROWS_AS(parse("foo(x1)", 1), ParseError);
    CHECK_THROWS_AS(parse("", 1), ParseError);
    try {
        parse("1+*2", 1);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.position() == 2);
    }
}

TEST_CASE("eval reports domain violations with the offending subexpression") {
    CHECK_THROWS_AS(eval(parse("ln(x1)", 1), std::vector<double>{-1.0}), EvalDomainError);
    CHECK_THROWS_AS(eval(parse("sqrt(x1)", 1), std::vector<double>{-0.5}), EvalDomainError);
    CHECK_THROWS_AS(eval(parse("1/x1", 1), std::vector<double>{0.0}), EvalDomainError);
    try {
        eval(parse("2*ln(1+x1)", 1), std::vector<double>{-2.0});
        CHECK(false);
    } catch (const EvalDomainError& e) {
        CHECK(e.subexpression().find("ln") != std::string::npos);
    }
}

TEST_CASE("to_string round-trips the tree") {
    for (const char* text : {"exp(0.2*x2/(1+x2))*sqrt(1+x1+x2)-1-0.4*x2-0.5*ln(1+x1+x2)",
                             "0.5*ln(1+x1+x2)+0.4*x2", "-x1^3+2*x2", "x1/(1+x1)+0.9*x2"}) {
        const Expr e = parse(text, 2);
        const Expr back = parse(to_string(e), 2);
        CHECK(equal(e, back));
        const std::vector<double> x{-0.2, -0.1};
        CHECK(eval(e, x) == doctest::Approx(eval(back, x)).epsilon(1e-15));
    }
}

TEST_CASE("series_eval produces the Taylor expansion about the center") {
    const Expr e = parse("exp(x1)", 1);
    const TruncatedSeries s = series_eval(e, std::vector<double>{0.0}, 3);
    const int i0[]{0}, i1[]{1}, i2[]{2}, i3[]{3};
    CHECK(s.coeff(i0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.coeff(i1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.coeff(i2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.coeff(i3) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("series_eval about a shifted center matches finite differences") {
    const Expr e = parse("ln(1+x1+x2)", 2);
    const std::vector<double> c{-0.1, -0.2};
    const TruncatedSeries s = series_eval(e, c, 2);
    const int i00[]{0, 0}, i10[]{1, 0}, i11[]{1, 1};
    CHECK(s.coeff(i00) == doctest::Approx(std::log(0.7)).epsilon(1e-12));
    CHECK(s.coeff(i10) == doctest::Approx(1.0 / 0.7).epsilon(1e-9));
    CHECK(s.coeff(i11) == doctest::Approx(-1.0 / 0.49).epsilon(1e-9));
}

TEST_CASE("eval_over_series composes expressions") {
    const Expr e = parse("x1^2+x2", 2);
    std::vector<TruncatedSeries> vars{TruncatedSeries::variable(2, 3, 1),
                                      TruncatedSeries::variable(2, 3, 0)};
    const TruncatedSeries s = eval_over_series(e, vars);
    const int ix1[]{1, 0}, ix2sq[]{0, 2};
    CHECK(s.coeff(ix1) == doctest::Approx(1.0));
    CHECK(s.coeff(ix2sq) == doctest::Approx(1.0));
}
