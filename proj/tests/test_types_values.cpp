#include <gtest/gtest.h>

#include "refi/minic.hpp"
#include "refi/surface.hpp"
#include "refi/types.hpp"
#include "refi/value.hpp"

using namespace refi;

TEST(MacAddr, ParsesAndPrints) {
  auto m = MacAddr::parse("02:00:0A:bc:00:FF");
  ASSERT_TRUE(m);
  EXPECT_EQ(to_string(*m), "02:00:0a:bc:00:ff");
  EXPECT_EQ(m->to_u64(), 0x02000abc00ffULL);
  EXPECT_EQ(MacAddr::from_u64(0x02000abc00ffULL), *m);
}

TEST(MacAddr, RejectsMalformedText) {
  EXPECT_FALSE(MacAddr::parse("02:00:00:00:00"));
  EXPECT_FALSE(MacAddr::parse("02:00:00:00:00:0g"));
  EXPECT_FALSE(MacAddr::parse("0200:00:00:00:00"));
  EXPECT_FALSE(MacAddr::parse(""));
}

TEST(Types, ParseAndPrintRoundTrip) {
  for (const char* text : {"Int32", "Bool", "TimeMs", "MacAddr", "Bytes[15]", "Pair[Int32, Bool]",
                           "Set[MacAddr, 64]", "Map[Bytes[15], Int32, 16]", "Frame"}) {
    SCOPED_TRACE(text);
    EXPECT_EQ(to_string(surface::parse_type(text)), text);
  }
}

TEST(Types, SetAndMapDefaultCapacity) {
  auto s = surface::parse_type("Set[Int32]");
  EXPECT_EQ(s.kind, TypeKind::FixedSet);
  EXPECT_EQ(s.length, kDefaultCapacity);
  auto m = surface::parse_type("Map[Int32, Bool]");
  EXPECT_EQ(m.length, kDefaultCapacity);
}

TEST(Types, ReactiveTypesParse) {
  auto r = surface::parse_reactive_type("Fold[Set[MacAddr, 8]]");
  EXPECT_EQ(r.kind, ReactiveType::Kind::Fold);
  EXPECT_EQ(r.inner, TypeTag::set(TypeTag::mac_addr(), 8));
  EXPECT_EQ(surface::parse_reactive_type("Reactive[Int32]"), ReactiveType::reactive(TypeTag::int32()));
}

TEST(Types, FoldIsSubtypeOfReactiveOnly) {
  const auto i = TypeTag::int32();
  EXPECT_TRUE(is_subtype(ReactiveType::fold(i), ReactiveType::reactive(i)));
  EXPECT_TRUE(is_subtype(ReactiveType::reactive(i), ReactiveType::reactive(i)));
  EXPECT_FALSE(is_subtype(ReactiveType::reactive(i), ReactiveType::fold(i)));
  EXPECT_FALSE(is_subtype(ReactiveType::fold(i), ReactiveType::reactive(TypeTag::boolean())));
  EXPECT_FALSE(is_subtype(ReactiveType::observer(), ReactiveType::reactive(TypeTag::unit())));
  EXPECT_TRUE(is_subtype(ReactiveType::observer(), ReactiveType::observer()));
}

TEST(Sizes, PackedModel) {
  using minic::size_of;
  EXPECT_EQ(size_of(TypeTag::int32()), 4u);
  EXPECT_EQ(size_of(TypeTag::boolean()), 1u);
  EXPECT_EQ(size_of(TypeTag::time_ms()), 4u);
  EXPECT_EQ(size_of(TypeTag::mac_addr()), 6u);
  EXPECT_EQ(size_of(TypeTag::bytes(15)), 15u);
  EXPECT_EQ(size_of(TypeTag::pair(TypeTag::int32(), TypeTag::boolean())), 5u);
  EXPECT_EQ(size_of(TypeTag::set(TypeTag::mac_addr(), 64)), 64u * 6 + 4);
  EXPECT_EQ(size_of(TypeTag::map(TypeTag::bytes(15), TypeTag::int32(), 16)), 16u * 19 + 4);
}

TEST(Values, ZeroValuesConform) {
  for (const char* text : {"Int32", "Bool", "TimeMs", "MacAddr", "Bytes[4]", "Pair[Int32, Bool]", "Set[Int32, 2]",
                           "Map[Int32, Int32, 2]", "Frame"}) {
    SCOPED_TRACE(text);
    auto t = surface::parse_type(text);
    EXPECT_TRUE(conforms(zero_value(t), t));
  }
  EXPECT_FALSE(conforms(Value::int32(1), TypeTag::boolean()));
  EXPECT_FALSE(conforms(Value::bytes({1, 2}), TypeTag::bytes(3)));
}

TEST(Values, JsonRoundTrip) {
  const auto pair_t = TypeTag::pair(TypeTag::int32(), TypeTag::mac_addr());
  const auto v = Value::pair(Value::int32(-7), Value::mac(MacAddr::from_u64(0x020000000001ULL)));
  EXPECT_EQ(from_json(to_json(v, pair_t), pair_t), v);

  const auto set_t = TypeTag::set(TypeTag::int32(), 4);
  auto s = minic::hashset_add(minic::hashset_add(zero_value(set_t), Value::int32(3)), Value::int32(9));
  EXPECT_EQ(from_json(to_json(s, set_t), set_t), s);

  EXPECT_THROW(from_json(Json("x"), TypeTag::int32()), std::invalid_argument);
  EXPECT_THROW(from_json(Json(5000000000LL), TypeTag::int32()), std::invalid_argument);
}

TEST(Values, HexRoundTrip) {
  std::vector<std::uint8_t> data = {0x00, 0x7f, 0x80, 0xff};
  EXPECT_EQ(to_hex(data), "007f80ff");
  EXPECT_EQ(from_hex("007F80ff"), data);
  EXPECT_FALSE(from_hex("abc"));
  EXPECT_FALSE(from_hex("zz"));
}

TEST(Values, CollectionsKeepInsertionOrderAndIgnoreDuplicates) {
  const auto set_t = TypeTag::set(TypeTag::int32(), 3);
  auto s = zero_value(set_t);
  for (int x : {5, 1, 5, 2}) s = minic::hashset_add(s, Value::int32(x));
  EXPECT_EQ(minic::cardinality(s), 3);
  EXPECT_EQ(s.as_set().members[0], Value::int32(5));
  EXPECT_THROW(minic::hashset_add(s, Value::int32(8)), minic::EflError);

  const auto map_t = TypeTag::map(TypeTag::int32(), TypeTag::int32(), 2);
  auto m = zero_value(map_t);
  m = minic::hashmap_put(m, Value::int32(1), Value::int32(10));
  m = minic::hashmap_put(m, Value::int32(1), Value::int32(11));
  EXPECT_EQ(minic::hashmap_get(m, Value::int32(1)), 11);
  EXPECT_EQ(minic::hashmap_get(m, Value::int32(2)), minic::kMapEntryMissing);
  m = minic::hashmap_put(m, Value::int32(2), Value::int32(20));
  EXPECT_THROW(minic::hashmap_put(m, Value::int32(3), Value::int32(30)), minic::EflError);
}

TEST(Values, CompoundKeyLayout) {
  auto k = minic::compound_key(MacAddr::from_u64(0x010203040506ULL), 0x0a0b0c0d);
  const auto& b = k.as_bytes().data;
  ASSERT_EQ(b.size(), static_cast<std::size_t>(minic::kCompoundKeyBytes));
  EXPECT_EQ((std::vector<std::uint8_t>(b.begin(), b.begin() + 10)),
            (std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6, 0x0d, 0x0c, 0x0b, 0x0a}));
  for (std::size_t i = 10; i < b.size(); ++i) EXPECT_EQ(b[i], 0);
}
