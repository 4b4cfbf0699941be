#include <gtest/gtest.h>

#include <random>

#include "refi/frame.hpp"
#include "test_support.hpp"

using namespace refi;
using namespace refi::frame;
namespace rt = refi::testing;

namespace {

MacAddr mac(const std::vector<std::uint8_t>& raw, std::size_t at) {
  MacAddr m;
  for (int i = 0; i < 6; ++i) m.octets[static_cast<std::size_t>(i)] = raw[at + static_cast<std::size_t>(i)];
  return m;
}

}  // namespace

TEST(FrameTable, SixtyFourHeaderVectors) {
  const auto vectors = rt::header_vectors();
  ASSERT_EQ(vectors.size(), 64u);
  for (const auto& v : vectors) {
    SCOPED_TRACE(::testing::Message() << "fc0=" << int(v.fc0) << " fc1=" << int(v.fc1));
    const RxInfo rx{-40, -95};
    auto f = decode_frame(v.raw, rx);
    const bool to_ds = v.fc1 & 1;
    const bool from_ds = (v.fc1 >> 1) & 1;
    if (to_ds && from_ds) {
      EXPECT_FALSE(f);
      continue;
    }
    ASSERT_TRUE(f);
    EXPECT_EQ(f->version, v.fc0 & 3);
    EXPECT_EQ(f->fc_type, (v.fc0 >> 2) & 3);
    EXPECT_EQ(f->sub_type, v.fc0 >> 4);
    EXPECT_EQ(f->to_ds, to_ds);
    EXPECT_EQ(f->from_ds, from_ds);
    EXPECT_EQ(f->more_frags, bool((v.fc1 >> 2) & 1));
    EXPECT_EQ(f->retry, bool((v.fc1 >> 3) & 1));
    EXPECT_EQ(f->pwr_mngmt, bool((v.fc1 >> 4) & 1));
    EXPECT_EQ(f->more_data, bool((v.fc1 >> 5) & 1));
    EXPECT_EQ(f->protected_, bool((v.fc1 >> 6) & 1));
    EXPECT_EQ(f->order, bool((v.fc1 >> 7) & 1));
    EXPECT_EQ(f->duration, v.raw[8] | (v.raw[9] << 8));
    EXPECT_EQ(f->seq_ctl, v.raw[28] | (v.raw[29] << 8));
    EXPECT_EQ(f->snr, 55);

    const auto a1 = mac(v.raw, 10), a2 = mac(v.raw, 16), a3 = mac(v.raw, 22);
    if (from_ds) {
      EXPECT_EQ(f->ds_type, kFromAp);
      EXPECT_EQ(f->dst, a1);
      EXPECT_EQ(f->bssid, a2);
      EXPECT_EQ(f->src, a3);
    } else if (to_ds) {
      EXPECT_EQ(f->ds_type, kToAp);
      EXPECT_EQ(f->bssid, a1);
      EXPECT_EQ(f->src, a2);
      EXPECT_EQ(f->dst, a3);
    } else {
      EXPECT_EQ(f->ds_type, kFromTdls);
      EXPECT_EQ(f->dst, a1);
      EXPECT_EQ(f->src, a2);
      EXPECT_EQ(f->bssid, a3);
    }

    const int type = (v.fc0 >> 2) & 3;
    int expected_class = kOther;
    if (type == 0) expected_class = kManagement;
    if (type == 1) expected_class = kControl;
    if (type == 2) expected_class = from_ds ? kFromApToDst : (to_ds ? kFromSrcToAp : kFromSrcToDst);
    EXPECT_EQ(f->type, expected_class);

    const bool plain_data = type == 2 && (v.fc0 >> 4) == 0;
    EXPECT_EQ(parse_frame(v.raw, rx).has_value(), plain_data);
  }
}

TEST(FrameTable, IndependentBitArithmetic) {
  const auto vectors = rt::header_vectors();
  for (const auto& m : rt::header_vector_mismatches(vectors)) ADD_FAILURE() << m;
}

TEST(Frame, ShortBuffersAreRejected) {
  std::vector<std::uint8_t> raw(kMinLength - 1, 0);
  EXPECT_FALSE(decode_frame(raw, {}));
  raw.push_back(0);
  EXPECT_TRUE(decode_frame(raw, {}));
}

TEST(Frame, SerializeInvertsDecode) {
  Frame f;
  f.fc_type = 2;
  f.sub_type = 8;
  f.to_ds = true;
  f.retry = true;
  f.duration = 314;
  f.seq_ctl = 0xabcd;
  f.src = MacAddr::from_u64(0x020000000002ULL);
  f.dst = MacAddr::from_u64(0x020000000003ULL);
  f.bssid = MacAddr::from_u64(0x0200000000feULL);
  const auto raw = serialize_frame(f);
  ASSERT_EQ(raw.size(), kMinLength);
  auto back = decode_frame(raw, {-50, -90});
  ASSERT_TRUE(back);
  EXPECT_EQ(back->src, f.src);
  EXPECT_EQ(back->dst, f.dst);
  EXPECT_EQ(back->bssid, f.bssid);
  EXPECT_EQ(back->duration, 314);
  EXPECT_EQ(back->seq_ctl, 0xabcd);
  EXPECT_EQ(back->type, kFromSrcToAp);
  EXPECT_EQ(back->snr, 40);
  EXPECT_EQ(serialize_frame(*back), raw);
}

TEST(Frame, ValueRoundTrip) {
  Frame f;
  f.fc_type = 0;
  f.type = kManagement;
  f.src = MacAddr::from_u64(0x020000000101ULL);
  f.signal = -45;
  f.noise = -95;
  f.snr = 50;
  const auto v = to_value(f);
  EXPECT_TRUE(conforms(v, frame_type()));
  EXPECT_EQ(from_value(v), f);
  EXPECT_EQ(frame_type().field_index("protected"), 10);
  EXPECT_EQ(frame_type().field_index("ds_type"), 20);
}

TEST(Frame, ClassCodes) {
  EXPECT_EQ(classify(0, kFromAp), kManagement);
  EXPECT_EQ(classify(1, kToAp), kControl);
  EXPECT_EQ(classify(2, kFromAp), kFromApToDst);
  EXPECT_EQ(classify(2, kToAp), kFromSrcToAp);
  EXPECT_EQ(classify(2, kFromTdls), kFromSrcToDst);
  EXPECT_EQ(classify(3, kFromTdls), kOther);
}
