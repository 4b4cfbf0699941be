#ifndef REFI_RUNTIME_H
#define REFI_RUNTIME_H

/*
 * Interface between compiled ReactiFi programs and the firmware runtime.
 *
 * A compiled program defines `void init(void)` and `void update(void)`.
 * The runtime calls init() once, then update() once per event batch after
 * recording which sources fired and with what payload.
 */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <string.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Marks function parameters a body does not read. */
#define REFI_UNUSED __attribute__((unused))

/* ------------------------------------------------------------------------ */
/* Value types */

typedef int32_t time_ms_t;
typedef uint64_t mac_addr_t; /* 48-bit address, first octet most significant */

typedef struct {
  uint8_t data[15];
} bytes15_t;

typedef struct {
  uint8_t data[64];
} bytes64_t;

typedef struct {
  int32_t version;
  int32_t type;
  int32_t fc_type;
  int32_t sub_type;
  bool to_ds;
  bool from_ds;
  bool more_frags;
  bool retry;
  bool pwr_mngmt;
  bool more_data;
  bool protected;
  bool order;
  int32_t duration;
  int32_t seq_ctl;
  mac_addr_t src;
  mac_addr_t dst;
  mac_addr_t bssid;
  int32_t signal;
  int32_t noise;
  int32_t snr;
  int32_t ds_type;
} frame_t;

/* Collections are handles to runtime-managed fixed-capacity storage with
 * value semantics: operations that change a collection return the new
 * handle. */
typedef struct refi_hashset *hashset_t;
typedef struct refi_hashmap *hashmap_t;

/* ------------------------------------------------------------------------ */
/* Frame classes and sentinels */

#define MANAGEMENT 0
#define CONTROL 1
#define FROM_AP_TP_DST 2
#define FROM_SRC_TO_AP 3
#define FROM_SRC_TO_DST 4
#define OTHER_FRAME 5
#define MAP_ENTRY_MISSING (-2147483647 - 1)

/* ------------------------------------------------------------------------ */
/* Sources */

typedef int32_t refi_source_t;

#define SentFrame ((refi_source_t)1)
#define ReceivedFrame ((refi_source_t)2)
#define Monitor ((refi_source_t)3)
#define ScanResult ((refi_source_t)4)
#define ChannelState ((refi_source_t)5)
#define TxPower ((refi_source_t)6)
#define IOCTL ((refi_source_t)7)
#define REFI_TIMER_BASE ((refi_source_t)0x10000)
#define TIMER(period_ms) ((refi_source_t)(REFI_TIMER_BASE + (period_ms)))

bool runtime_is_triggered(refi_source_t source);
frame_t runtime_payload_frame(refi_source_t source);
bytes64_t runtime_payload_bytes64(refi_source_t source);
int32_t runtime_payload_int32(refi_source_t source);
time_ms_t runtime_payload_time(refi_source_t source);

/* ------------------------------------------------------------------------ */
/* Storage */

/* Ends the lifetime of a transient value. The runtime may poison the
 * storage; the value is never read again by generated code. */
void refi_release(void *value, size_t size);
#define deallocate(x) refi_release(&(x), sizeof(x))

/* ------------------------------------------------------------------------ */
/* Collections. hashset_new()/hashmap_new() expand to the capacity the
 * compiler defines around each use. */

hashset_t refi_hashset_new(int32_t capacity);
hashset_t refi_hashset_add(hashset_t set, const void *elem, size_t size);
int32_t refi_hashset_size(hashset_t set);
hashmap_t refi_hashmap_new(int32_t capacity);
hashmap_t refi_hashmap_put(hashmap_t map, const void *key, size_t key_size, int32_t value);
int32_t refi_hashmap_get(hashmap_t map, const void *key, size_t key_size);
int32_t refi_hashmap_size(hashmap_t map);
bytes15_t compound_key(mac_addr_t mac, int32_t tag);

#define hashset_new() refi_hashset_new(REFI_SET_CAPACITY)
#define hashmap_new() refi_hashmap_new(REFI_MAP_CAPACITY)
#define hashset_add(s, e) \
  ({ __typeof__(e) refi_elem_ = (e); refi_hashset_add((s), &refi_elem_, sizeof refi_elem_); })
#define hashmap_put(m, k, v) \
  ({ __typeof__(k) refi_key_ = (k); refi_hashmap_put((m), &refi_key_, sizeof refi_key_, (v)); })
#define hashmap_get(m, k) \
  ({ __typeof__(k) refi_key_ = (k); refi_hashmap_get((m), &refi_key_, sizeof refi_key_); })
#define refi_sizeof(c) _Generic((c), hashset_t: refi_hashset_size, hashmap_t: refi_hashmap_size)(c)

/* ------------------------------------------------------------------------ */
/* Effects */

typedef enum { REFI_VALUE_INT32, REFI_VALUE_BOOL, REFI_VALUE_MAC, REFI_VALUE_BLOB } refi_value_kind_t;

void refi_send_to_os(const void *value, size_t size, refi_value_kind_t kind);

#define send_to_os(x)                                                                \
  ({                                                                                 \
    __typeof__(x) refi_out_ = (x);                                                   \
    refi_send_to_os(&refi_out_, sizeof refi_out_,                                    \
                    _Generic(refi_out_, int32_t: REFI_VALUE_INT32, bool: REFI_VALUE_BOOL, \
                             mac_addr_t: REFI_VALUE_MAC, default: REFI_VALUE_BLOB)); \
  })

void send_frame(frame_t frame);
void switch_channel(int32_t channel);
void change_csi(bytes64_t config);
void set_tx_power(int32_t dbm);
void set_tdls(bool enabled);

/* ------------------------------------------------------------------------ */
/* Entry points provided by the compiled program */

void init(void);
void update(void);

#ifdef __cplusplus
}
#endif

#endif /* REFI_RUNTIME_H */
