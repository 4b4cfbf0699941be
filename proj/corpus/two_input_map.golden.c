/* Generated by refi from two_input_map.rfi. */
#include "refi_runtime.h"

static frame_t subframe_fn(frame_t f) {
  return f;
}

static mac_addr_t extractAddress(frame_t fr REFI_UNUSED, frame_t sub) {
  return sub.src;
}

void init(void) {
}

void update(void) {
  bool monitor_condition;
  frame_t frame_value;
  frame_t subframe_value;
  mac_addr_t address_value;

  monitor_condition = runtime_is_triggered(Monitor);

  if (monitor_condition) {
    frame_value = runtime_payload_frame(Monitor);
    subframe_value = subframe_fn(frame_value);
    address_value = extractAddress(frame_value, subframe_value);
    deallocate(frame_value);
    deallocate(subframe_value);
    send_to_os(address_value);
    deallocate(address_value);
  }
}
