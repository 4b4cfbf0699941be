/*
 * Hand-written TDLS switch for the file-sharing scenario, in the style of
 * conventional driver code. The firmware calls refi_fs_rx() for every
 * received frame; the module keeps running SNR averages per transmitter
 * and path, and toggles TDLS when the direct path beats the relayed one.
 *
 * Compare with filesharing.rfi, which expresses the same behaviour.
 */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <string.h>

#include "refi_runtime.h"

#define FS_OWN_ADDR 0x020000000001ULL
#define FS_TABLE_SLOTS 16
#define FS_HDR_OFFSET 6
#define FS_HDR_MIN_LEN 30

#define FC_TYPE_MGMT 0
#define FC_TYPE_CTRL 1
#define FC_TYPE_DATA 2

#define FC1_TO_DS 0x01
#define FC1_FROM_DS 0x02

enum fs_class {
  FS_CLASS_MGMT,
  FS_CLASS_CTRL,
  FS_CLASS_FROM_AP,
  FS_CLASS_TO_AP,
  FS_CLASS_DIRECT,
  FS_CLASS_OTHER,
};

struct fs_header {
  uint8_t type;
  uint8_t sub_type;
  bool to_ds;
  bool from_ds;
  mac_addr_t src;
  mac_addr_t dst;
  mac_addr_t bssid;
};

struct fs_slot {
  bool used;
  mac_addr_t peer;
  bool relayed;
  int32_t avg;
};

static struct fs_slot fs_table[FS_TABLE_SLOTS];
static int32_t fs_frames_seen;
static bool fs_have_decision;
static bool fs_last_decision;

static mac_addr_t read_mac(const uint8_t *p) {
  mac_addr_t m = 0;
  for (int i = 0; i < 6; i++) {
    m = (m << 8) | p[i];
  }
  return m;
}

/* Returns false for short buffers and four-address frames. */
static bool parse_header(const uint8_t *raw, size_t len, struct fs_header *h) {
  if (len < FS_HDR_MIN_LEN) {
    return false;
  }
  const uint8_t fc0 = raw[FS_HDR_OFFSET];
  const uint8_t fc1 = raw[FS_HDR_OFFSET + 1];
  h->type = (fc0 >> 2) & 0x3;
  h->sub_type = (fc0 >> 4) & 0xf;
  h->to_ds = (fc1 & FC1_TO_DS) != 0;
  h->from_ds = (fc1 & FC1_FROM_DS) != 0;
  if (h->to_ds && h->from_ds) {
    return false;
  }

  const mac_addr_t a1 = read_mac(raw + 10);
  const mac_addr_t a2 = read_mac(raw + 16);
  const mac_addr_t a3 = read_mac(raw + 22);
  if (h->from_ds) {
    h->dst = a1;
    h->bssid = a2;
    h->src = a3;
  } else if (h->to_ds) {
    h->bssid = a1;
    h->src = a2;
    h->dst = a3;
  } else {
    h->dst = a1;
    h->src = a2;
    h->bssid = a3;
  }
  return true;
}

static enum fs_class classify_header(const struct fs_header *h) {
  switch (h->type) {
    case FC_TYPE_MGMT:
      return FS_CLASS_MGMT;
    case FC_TYPE_CTRL:
      return FS_CLASS_CTRL;
    case FC_TYPE_DATA:
      if (h->from_ds) {
        return FS_CLASS_FROM_AP;
      }
      return h->to_ds ? FS_CLASS_TO_AP : FS_CLASS_DIRECT;
    default:
      return FS_CLASS_OTHER;
  }
}

static uint32_t slot_hash(mac_addr_t peer, bool relayed) {
  uint64_t x = peer ^ (relayed ? 0x9e3779b97f4a7c15ULL : 0);
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return (uint32_t)(x % FS_TABLE_SLOTS);
}

/* Linear probing; returns NULL when the table is full. */
static struct fs_slot *find_slot(mac_addr_t peer, bool relayed, bool create) {
  uint32_t i = slot_hash(peer, relayed);
  for (int probes = 0; probes < FS_TABLE_SLOTS; probes++) {
    struct fs_slot *s = &fs_table[i];
    if (!s->used) {
      if (!create) {
        return NULL;
      }
      s->used = true;
      s->peer = peer;
      s->relayed = relayed;
      s->avg = MAP_ENTRY_MISSING;
      return s;
    }
    if (s->peer == peer && s->relayed == relayed) {
      return s;
    }
    i = (i + 1) % FS_TABLE_SLOTS;
  }
  return NULL;
}

static int32_t lookup_avg(mac_addr_t peer, bool relayed) {
  struct fs_slot *s = find_slot(peer, relayed, false);
  return s ? s->avg : MAP_ENTRY_MISSING;
}

static void update_avg(mac_addr_t peer, bool relayed, int32_t snr) {
  struct fs_slot *s = find_slot(peer, relayed, true);
  if (s == NULL) {
    return;
  }
  if (s->avg == MAP_ENTRY_MISSING) {
    s->avg = snr;
  } else {
    s->avg = s->avg + (snr - s->avg) / fs_frames_seen;
  }
}

static void decide(bool direct_better) {
  fs_have_decision = true;
  fs_last_decision = direct_better;
  set_tdls(direct_better);
}

void refi_fs_init(void) {
  memset(fs_table, 0, sizeof fs_table);
  fs_frames_seen = 0;
  fs_have_decision = false;
  fs_last_decision = false;
}

void refi_fs_rx(const uint8_t *raw, size_t len, int32_t signal, int32_t noise) {
  struct fs_header h;
  if (!parse_header(raw, len, &h)) {
    return;
  }
  if (h.dst != FS_OWN_ADDR) {
    return;
  }
  fs_frames_seen++;

  const enum fs_class cls = classify_header(&h);
  const bool direct = cls == FS_CLASS_TO_AP || cls == FS_CLASS_DIRECT;
  const bool relayed = cls == FS_CLASS_FROM_AP;
  if (!direct && !relayed) {
    return;
  }

  update_avg(h.src, relayed, signal - noise);

  const int32_t own = lookup_avg(h.src, relayed);
  const int32_t other = lookup_avg(h.src, !relayed);
  if (direct) {
    decide(own > other);
  } else {
    decide(own < other);
  }
}

bool refi_fs_tdls_enabled(void) {
  return fs_have_decision && fs_last_decision;
}

int32_t refi_fs_frames_seen(void) {
  return fs_frames_seen;
}

int32_t refi_fs_peers(void) {
  int32_t n = 0;
  for (int i = 0; i < FS_TABLE_SLOTS; i++) {
    n += fs_table[i].used;
  }
  return n;
}
