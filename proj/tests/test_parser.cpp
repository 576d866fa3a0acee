#include <doctest.h>

#include "generators.hpp"
#include "vna/errors.hpp"
#include "vna/parser.hpp"

using namespace vna;
using namespace vnatest;

TEST_CASE("parse_formula: grammar examples") {
  FormulaPtr f = parse_formula("sup x . trRe(x * adj(x))");
  CHECK(classify(*f) == SentenceClass::Universal);
  PrefixSplit ps = strip_prefix(f);
  REQUIRE(ps.prefix.size() == 1);
  CHECK(ps.prefix[0].second == "x");
  REQUIRE(ps.matrix->kind() == Formula::Kind::Basic);
  CHECK(ps.matrix->term()->kind() == StarTerm::Kind::Product);
  CHECK(ps.matrix->term()->right()->kind() == StarTerm::Kind::Adjoint);

  FormulaPtr ea = parse_formula("inf x . sup y . d(x * y, y * x)");
  CHECK(classify(*ea) == SentenceClass::ExistsForall);
}

TEST_CASE("parse_formula: scalar magnitude error carries a span") {
  try {
    parse_formula("trRe((3/2^0) . x)");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.span().start >= 5);
    CHECK(e.span().end <= 13);
    CHECK(std::string(e.what()).find("magnitude") != std::string::npos);
  }
}

TEST_CASE("parse_formula: binding errors") {
  CHECK_THROWS_AS(parse_formula("sup x . sup x . trRe(x)"), ParseError);
  CHECK_NOTHROW(parse_formula("trRe(x)"));  // free variables fine by default
  CHECK_THROWS_AS(parse_formula("trRe(x)", {.require_sentence = true}), ParseError);
  CHECK_NOTHROW(parse_formula("sup x . trRe(x)", {.require_sentence = true}));
}

TEST_CASE("parse_formula: constants, scalars, connective spellings") {
  FormulaPtr f = parse_formula("monus(trRe(x), 2)");
  CHECK(f->kind() == Formula::Kind::Monus);
  CHECK(f->right()->value() == Dyadic(2));

  FormulaPtr g = parse_formula("1/2^1 . abs(trIm(x))");
  CHECK(g->kind() == Formula::Kind::Scale);
  CHECK(g->value() == Dyadic(BigInt(1), 1));

  FormulaPtr h = parse_formula("trRe((1/2^1 + 1/2^1 i) . x)");
  CHECK(h->term()->kind() == StarTerm::Kind::Scale);
  CHECK(h->term()->scalar().im == Dyadic(BigInt(1), 1));

  FormulaPtr k = parse_formula("max(sqrt(trRe(x)), min(0, trIm(y))) + d(x, 0)");
  CHECK(k->kind() == Formula::Kind::Add);

  FormulaPtr avg = parse_formula("trRe(avg(1, (-1/2^0) . 1))");
  CHECK(avg->term()->kind() == StarTerm::Kind::Average);

  CHECK_THROWS_AS(parse_formula("trRe(2)"), ParseError);  // 2 is not a term constant
  CHECK_THROWS_AS(parse_formula("sup x trRe(x)"), ParseError);  // missing dot
  CHECK_THROWS_AS(parse_formula(""), ParseError);
}

TEST_CASE("parse errors carry spans inside the input") {
  const char* bad[] = {"sup x . trRe(x) )", "trRe((x)", "d(x)", "max(1)", "sup . trRe(x)",
                       "trRe(x) + ", "avg(x,)", "@nope"};
  for (const char* src : bad) {
    try {
      parse_formula(src);
      FAIL_CHECK("expected ParseError for: ", src);
    } catch (const ParseError& e) {
      CHECK(e.span().start <= std::string(src).size());
      CHECK(e.span().end <= std::string(src).size() + 1);
    }
  }
}

TEST_CASE("format round-trips the grammar examples") {
  for (const char* src : {"sup x . trRe(x * adj(x))", "inf x . sup y . d(x * y, y * x)",
                          "monus(trRe(x), 2)", "sup x . trRe(x)",
                          "max(abs(trIm(x)), sqrt(trRe(x))) + 1/2^3 . trRe(avg(x, 1))"}) {
    FormulaPtr f = parse_formula(src);
    FormulaPtr g = parse_formula(format_formula(*f));
    CHECK(equal(f, g));
  }
}

TEST_CASE("format/parse round-trip on random ASTs") {
  // 10^3 random formulas, some quantified
  Rng rng(2024);
  GenProfile prof;
  prof.allow_sqrt = true;
  int trips = 0;
  while (trips < 1000) {
    int nvars = 1 + static_cast<int>(rng.next_u64() % 2);
    FormulaPtr f = random_universal(rng, nvars, prof);
    std::string text = format_formula(*f);
    FormulaPtr g = parse_formula(text);
    REQUIRE_MESSAGE(equal(f, g), text);
    ++trips;
  }
}

TEST_CASE("embedded constants parse against an environment") {
  TracialAlgebra m2 = TracialAlgebra::matrix(2);
  ParseOptions opts;
  opts.env.emplace("a", AlgElement::identity(m2));
  FormulaPtr f = parse_formula("sup x . d(@a * x, x * @a)", opts);
  CHECK(classify(*f) == SentenceClass::Universal);
  std::string text = format_formula(*f);
  CHECK(text.find("@a") != std::string::npos);
  FormulaPtr g = parse_formula(text, opts);
  CHECK(equal(f, g));
  CHECK_THROWS_AS(parse_formula("trRe(@b)", opts), ParseError);
}

TEST_CASE("parse_algebra") {
  TracialAlgebra m2 = parse_algebra("blocks: [2 @ 1/2^0]");
  CHECK(m2.block_count() == 1);
  CHECK(m2.blocks()[0].dim == 2);
  CHECK(m2.blocks()[0].weight == Dyadic(1));

  TracialAlgebra mix = parse_algebra("blocks: [1 @ 1/2^1, 2 @ 1/2^1]");
  CHECK(mix.block_count() == 2);
  CHECK(mix.real_dimension() == 10);

  // comments and blank lines around the content line
  CHECK_NOTHROW(parse_algebra("# direct sum\n\nblocks: [1 @ 1/2^1, 2 @ 1/2^1]\n"));

  CHECK_THROWS_AS(parse_algebra("blocks: [2 @ 1/2^1]"), ParseError);  // sums to 1/2
  CHECK_THROWS_AS(parse_algebra("blocks: [0 @ 1/2^0]"), ParseError);
  CHECK_THROWS_AS(parse_algebra("blocks: [2 @ 3/2^1]"), ParseError);  // weight > 1
  CHECK_THROWS_AS(parse_algebra(""), ParseError);
  CHECK_THROWS_AS(parse_algebra("blocks: [2 @ 1/3]"), ParseError);
}
