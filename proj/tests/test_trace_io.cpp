#include <gtest/gtest.h>

#include <sstream>

#include "refi/trace_io.hpp"

using namespace refi;
using namespace refi::trace_io;

namespace {

std::string data_frame_hex() {
  frame::Frame f;
  f.fc_type = 2;
  f.src = MacAddr::from_u64(0x020000000002ULL);
  f.dst = MacAddr::from_u64(0x020000000001ULL);
  f.bssid = MacAddr::from_u64(0x0200000000feULL);
  return to_hex(frame::serialize_frame(f));
}

}  // namespace

TEST(TraceIo, ParseWriteRoundTrip) {
  const std::string text =
      "{\"t_ms\":0,\"firings\":[{\"source\":\"TxPower\",\"payload\":12}]}\n"
      "\n"
      "{\"t_ms\":5,\"firings\":[{\"source\":\"Monitor\",\"payload\":{\"raw\":\"" +
      data_frame_hex() + "\",\"signal\":-40,\"noise\":-90}}]}\n"
      "{\"t_ms\":9,\"firings\":[]}\n";
  std::istringstream in(text);
  auto records = parse_trace(in);
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[1].t_ms, 5);
  std::ostringstream out;
  write_trace(out, records);
  std::string expected = text;
  expected.erase(expected.find("\n\n"), 1);
  EXPECT_EQ(out.str(), expected);
}

TEST(TraceIo, DecodesPayloads) {
  std::istringstream in(
      "{\"t_ms\":1,\"firings\":[{\"source\":\"TxPower\",\"payload\":-7},"
      "{\"source\":\"Monitor\",\"payload\":{\"raw\":\"" +
      data_frame_hex() +
      "\",\"signal\":-40,\"noise\":-90}}]}\n"
      "{\"t_ms\":2,\"firings\":[{\"source\":\"ScanResult\",\"payload\":\"" +
      std::string(128, 'a') + "\"}]}\n");
  auto trace = read_trace(in);
  ASSERT_EQ(trace.size(), 2u);
  ASSERT_EQ(trace[0].firings.size(), 2u);
  EXPECT_EQ(trace[0].firings[0].payload, Value::int32(-7));
  const auto f = frame::from_value(trace[0].firings[1].payload);
  EXPECT_EQ(f.type, frame::kFromSrcToDst);
  EXPECT_EQ(f.snr, 50);
  EXPECT_EQ(f.dst, MacAddr::from_u64(0x020000000001ULL));
  EXPECT_EQ(trace[1].firings[0].payload.as_bytes().data.size(), 64u);
}

TEST(TraceIo, ErrorsNameTheLine) {
  auto error_of = [](const std::string& text) -> std::string {
    std::istringstream in(text);
    try {
      read_trace(in);
    } catch (const interp::TraceError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(error_of("{\"t_ms\":0,\"firings\":[]}\nnot json\n").rfind("trace line 2:", 0), 0u);
  EXPECT_NE(error_of("{\"firings\":[]}\n").find("'t_ms' must be an integer"), std::string::npos);
  EXPECT_NE(error_of("{\"t_ms\":-1,\"firings\":[]}\n").find("negative"), std::string::npos);
  EXPECT_NE(error_of("{\"t_ms\":1}\n").find("'firings'"), std::string::npos);
  EXPECT_NE(error_of("{\"t_ms\":1,\"firings\":[{\"source\":\"Bogus\",\"payload\":1}]}\n").find("unknown source"),
            std::string::npos);
  EXPECT_NE(error_of("{\"t_ms\":1,\"firings\":[{\"source\":\"Monitor\",\"payload\":{\"raw\":\"00\",\"signal\":0,"
                     "\"noise\":0}}]}\n")
                .find("could not be decoded"),
            std::string::npos);
  EXPECT_NE(error_of("{\"t_ms\":1,\"firings\":[{\"source\":\"TxPower\",\"payload\":\"x\"}]}\n"), "");
  EXPECT_NE(error_of("{\"t_ms\":1,\"firings\":[{\"source\":\"Timer\",\"payload\":1}]}\n"), "");
}

TEST(TraceIo, EffectLines) {
  interp::EffectLog log{
      {10, EffectKind::SetTDLS, Value::boolean(true), TypeTag::boolean()},
      {20, EffectKind::SendToOS, Value::pair(Value::int32(1), Value::int32(2)),
       TypeTag::pair(TypeTag::int32(), TypeTag::int32())},
      {30, EffectKind::SendToOS, Value::mac(MacAddr::from_u64(0x020000000001ULL)), TypeTag::mac_addr()},
  };
  const auto text = effects_to_string(log);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "{\"t_ms\":10,\"effect\":\"SetTDLS\",\"value\":true}");
  std::getline(in, line);
  auto j = Json::parse(line);
  EXPECT_EQ(j["effect"], "SendToOS");
  EXPECT_EQ(from_json(j["value"], log[1].type), log[1].value);
  std::getline(in, line);
  EXPECT_EQ(Json::parse(line)["value"], "02:00:00:00:00:01");
}

TEST(TraceIo, FramePayloadRoundTrip) {
  frame::Frame f;
  f.fc_type = 0;
  f.sub_type = 4;
  f.src = MacAddr::from_u64(0x020000000101ULL);
  f.dst = MacAddr::from_u64(0xffffffffffffULL);
  f.signal = -55;
  f.noise = -95;
  TraceRecord r{3, {{"Monitor", frame_payload(f)}}};
  auto trace = decode({r});
  const auto back = frame::from_value(trace[0].firings[0].payload);
  EXPECT_EQ(back.src, f.src);
  EXPECT_EQ(back.type, frame::kManagement);
  EXPECT_EQ(back.sub_type, 4);
  EXPECT_EQ(back.snr, 40);
}
