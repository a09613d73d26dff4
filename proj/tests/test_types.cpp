#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "zoo/types.hpp"

using namespace zoo;

TEST_CASE("parse_type_string handles arrow signatures") {
  auto sig = parse_type_string("png_img -> en_text");
  REQUIRE(sig.inputs.size() == 1);
  CHECK(sig.inputs[0] == DataType::media(MediaBase::Image, "png"));
  CHECK(sig.output == DataType::media(MediaBase::Text, "en"));
}

TEST_CASE("a single token is a zero-input service type") {
  auto sig = parse_type_string("fr_text");
  CHECK(sig.inputs.empty());
  CHECK(sig.output == DataType::media(MediaBase::Text, "fr"));
}

TEST_CASE("unknown tokens are rejected with the offending token") {
  try {
    parse_type_string("png_img -> banana");
    FAIL("expected UnknownTypeError");
  } catch (const UnknownTypeError& e) {
    CHECK(e.token == "banana");
  }
}

TEST_CASE("blank input is an empty signature") {
  CHECK_THROWS_AS(parse_type_string(""), EmptySignatureError);
  CHECK_THROWS_AS(parse_type_string("   \t "), EmptySignatureError);
}

TEST_CASE("bare media base names are not valid tokens") {
  CHECK_THROWS_AS(parse_type_string("image -> int"), UnknownTypeError);
  CHECK_THROWS_AS(parse_type_string("text"), UnknownTypeError);
}

TEST_CASE("whitespace around arrows is ignored") {
  auto spaced = parse_type_string("  png_img   ->en_text ");
  auto tight = parse_type_string("png_img->en_text");
  CHECK(spaced == tight);
}

TEST_CASE("format_type_string is the inverse spelling") {
  ServiceSignature sig;
  sig.inputs = {DataType::media(MediaBase::Image, "png")};
  sig.output = DataType::media(MediaBase::Text, "en");
  CHECK(format_type_string(sig) == "png_img -> en_text");

  ServiceSignature constant;
  constant.output = DataType::primitive(PrimitiveKind::Int);
  CHECK(format_type_string(constant) == "int");

  ServiceSignature numeric;
  numeric.inputs = {DataType::ndarray(),
                    DataType::primitive(PrimitiveKind::Float)};
  numeric.output = DataType::ndarray();
  CHECK(format_type_string(numeric) == "ndarray -> float -> ndarray");
}

TEST_CASE("parse . format round-trips over random signatures") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    auto sig = zt::random_signature(rng);
    CHECK(parse_type_string(format_type_string(sig)) == sig);
  }
}

TEST_CASE("media subtypes are extensible through registration") {
  TypeRegistry reg;
  CHECK_FALSE(reg.parse_token("webp_img").has_value());
  reg.register_media_subtype(MediaBase::Image, "webp");
  auto t = reg.parse_token("webp_img");
  REQUIRE(t.has_value());
  CHECK(*t == DataType::media(MediaBase::Image, "webp"));
  CHECK(reg.token_for(*t) == "webp_img");

  auto sig = parse_type_string("webp_img -> int", reg);
  CHECK(sig.inputs[0] == *t);
}

TEST_CASE("equality is structural and exact") {
  CHECK(DataType::media(MediaBase::Image, "png") ==
        DataType::media(MediaBase::Image, "png"));
  CHECK(DataType::media(MediaBase::Image, "png") !=
        DataType::media(MediaBase::Image, "jpeg"));
  CHECK(DataType::media(MediaBase::Text, "en") !=
        DataType::media(MediaBase::Voice, "en"));
  CHECK(DataType::primitive(PrimitiveKind::Int) !=
        DataType::primitive(PrimitiveKind::Float));
  CHECK(DataType::ndarray() == DataType::ndarray());
}
