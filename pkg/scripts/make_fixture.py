"""Generate the synthetic NSL-KDD-format fixtures under tests/data/.

The real KDDTrain+/KDDTest+ files are not redistributed here.  These
records follow the field layout, symbol vocabularies and rough per-attack
signatures of the real files so the pipeline can be exercised end to end.
They are NOT samples of the published data; accuracy figures measured on
them say nothing about NSL-KDD.

    python scripts/make_fixture.py
    python scripts/make_fixture.py --records 125973 --out /tmp/big.txt

The second form writes one training-mix file of the given size, which is
handy for rehearsing run times at the published file's scale.
"""
import argparse
import os

import numpy as np

from amids.dataset import FEATURE_NAMES

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "tests", "data")

COL = {name: i for i, name in enumerate(FEATURE_NAMES)}
RATE_FIELDS = [n for n in FEATURE_NAMES if n.endswith("_rate")]


def blank():
    return {name: 0 for name in FEATURE_NAMES}


def jitter_rate(rng, value, scale=0.03):
    return float(np.clip(value + rng.normal(0, scale), 0.0, 1.0))


def normal(rng):
    r = blank()
    proto, service = [
        ("tcp", "http"), ("tcp", "http"), ("tcp", "http"), ("tcp", "smtp"),
        ("tcp", "ftp_data"), ("tcp", "ftp"), ("udp", "domain_u"), ("udp", "private"),
        ("tcp", "telnet"), ("icmp", "eco_i"), ("tcp", "finger"), ("tcp", "auth"),
    ][rng.integers(12)]
    r.update(protocol_type=proto, service=service, flag="SF")
    if proto == "tcp" and rng.random() < 0.04:
        r["flag"] = ["REJ", "S0", "RSTO", "S1", "SH", "OTH", "S2", "S3", "RSTR"][rng.integers(9)]
    r["duration"] = int(rng.exponential(3)) if rng.random() < 0.2 else 0
    r["src_bytes"] = int(rng.lognormal(5.5, 0.8))
    r["dst_bytes"] = int(rng.lognormal(7.5, 1.2)) if proto == "tcp" else int(rng.lognormal(4.5, 0.5))
    r["logged_in"] = 1 if proto == "tcp" else 0
    r["hot"] = int(rng.random() < 0.05)
    r["count"] = int(rng.integers(1, 30))
    r["srv_count"] = int(rng.integers(1, 40))
    r["same_srv_rate"] = jitter_rate(rng, 1.0)
    r["diff_srv_rate"] = jitter_rate(rng, 0.0)
    r["srv_diff_host_rate"] = jitter_rate(rng, 0.1, 0.1)
    r["dst_host_count"] = int(rng.integers(1, 256))
    r["dst_host_srv_count"] = int(rng.integers(100, 256))
    r["dst_host_same_srv_rate"] = jitter_rate(rng, 0.95)
    r["dst_host_diff_srv_rate"] = jitter_rate(rng, 0.02)
    r["dst_host_same_src_port_rate"] = jitter_rate(rng, 0.05, 0.05)
    r["dst_host_srv_diff_host_rate"] = jitter_rate(rng, 0.03)
    return r


def neptune(rng):
    r = blank()
    service = ["private", "other", "telnet", "ftp", "http", "smtp", "finger", "auth", "imap4", "uucp"][rng.integers(10)]
    flag = "S0" if rng.random() < 0.85 else "REJ"
    r.update(protocol_type="tcp", service=service, flag=flag)
    r["count"] = int(rng.integers(100, 512))
    r["srv_count"] = int(rng.integers(1, 30))
    serr = 1.0 if flag == "S0" else 0.0
    r["serror_rate"] = r["srv_serror_rate"] = serr
    r["rerror_rate"] = r["srv_rerror_rate"] = 1.0 - serr
    r["same_srv_rate"] = jitter_rate(rng, 0.05)
    r["diff_srv_rate"] = jitter_rate(rng, 0.07)
    r["dst_host_count"] = 255
    r["dst_host_srv_count"] = int(rng.integers(1, 30))
    r["dst_host_same_srv_rate"] = jitter_rate(rng, 0.05)
    r["dst_host_diff_srv_rate"] = jitter_rate(rng, 0.07)
    r["dst_host_serror_rate"] = r["dst_host_srv_serror_rate"] = serr
    r["dst_host_rerror_rate"] = r["dst_host_srv_rerror_rate"] = 1.0 - serr
    return r


def smurf(rng):
    r = blank()
    r.update(protocol_type="icmp", service="ecr_i", flag="SF")
    r["src_bytes"] = [1032, 520][rng.integers(2)]
    r["count"] = r["srv_count"] = int(rng.integers(300, 512))
    r["same_srv_rate"] = 1.0
    r["dst_host_count"] = r["dst_host_srv_count"] = 255
    r["dst_host_same_srv_rate"] = 1.0
    r["dst_host_same_src_port_rate"] = 1.0
    return r


def back(rng):
    r = normal(rng)
    r.update(protocol_type="tcp", service="http", flag="SF")
    r["src_bytes"] = 54540
    r["dst_bytes"] = int(rng.choice([7300, 8314]))
    r["hot"] = 2
    r["num_compromised"] = 1
    return r


def teardrop(rng):
    r = blank()
    r.update(protocol_type="udp", service="private", flag="SF")
    r["src_bytes"] = 28
    r["wrong_fragment"] = 3
    r["count"] = int(rng.integers(1, 100))
    r["srv_count"] = r["count"]
    r["same_srv_rate"] = 1.0
    r["dst_host_count"] = int(rng.integers(50, 256))
    r["dst_host_srv_count"] = int(rng.integers(1, 60))
    return r


def pod(rng):
    r = blank()
    r.update(protocol_type="icmp", service="ecr_i", flag="SF")
    r["src_bytes"] = 1480
    r["wrong_fragment"] = 1
    r["count"] = r["srv_count"] = int(rng.integers(1, 5))
    r["same_srv_rate"] = 1.0
    r["dst_host_count"] = int(rng.integers(1, 100))
    r["dst_host_srv_count"] = r["dst_host_count"]
    return r


def land(rng):
    r = neptune(rng)
    r.update(service="finger", flag="S0", land=1)
    r["count"] = r["srv_count"] = 1
    return r


def satan(rng):
    r = blank()
    proto = "tcp" if rng.random() < 0.9 else "udp"
    r.update(protocol_type=proto, service=["private", "other", "finger", "telnet", "ftp"][rng.integers(5)],
             flag=["REJ", "S0", "RSTO", "SF"][rng.integers(4)])
    r["count"] = int(rng.integers(1, 10))
    r["srv_count"] = int(rng.integers(1, 10))
    r["rerror_rate"] = r["srv_rerror_rate"] = jitter_rate(rng, 0.8, 0.2)
    r["diff_srv_rate"] = jitter_rate(rng, 0.8, 0.2)
    r["dst_host_count"] = 255
    r["dst_host_srv_count"] = int(rng.integers(1, 20))
    r["dst_host_diff_srv_rate"] = jitter_rate(rng, 0.7, 0.2)
    r["dst_host_rerror_rate"] = jitter_rate(rng, 0.8, 0.2)
    return r


def ipsweep(rng):
    r = blank()
    r.update(protocol_type="icmp", service=["eco_i", "ecr_i"][int(rng.random() < 0.1)], flag="SF")
    r["src_bytes"] = [8, 18][rng.integers(2)]
    r["count"] = r["srv_count"] = int(rng.integers(1, 4))
    r["srv_diff_host_rate"] = 1.0
    r["dst_host_count"] = int(rng.integers(1, 100))
    r["dst_host_srv_count"] = int(rng.integers(1, 100))
    r["dst_host_same_src_port_rate"] = 1.0
    r["dst_host_srv_diff_host_rate"] = jitter_rate(rng, 0.6, 0.2)
    return r


def portsweep(rng):
    r = blank()
    r.update(protocol_type="tcp", service="private", flag=["RSTR", "REJ", "RSTO"][rng.integers(3)])
    r["duration"] = int(rng.integers(0, 5000)) if rng.random() < 0.3 else 0
    r["count"] = r["srv_count"] = 1
    r["rerror_rate"] = r["srv_rerror_rate"] = 1.0
    r["srv_diff_host_rate"] = 1.0
    r["dst_host_count"] = int(rng.integers(1, 256))
    r["dst_host_srv_count"] = int(rng.integers(1, 5))
    r["dst_host_diff_srv_rate"] = jitter_rate(rng, 0.6, 0.2)
    r["dst_host_same_src_port_rate"] = jitter_rate(rng, 0.9, 0.1)
    r["dst_host_rerror_rate"] = r["dst_host_srv_rerror_rate"] = jitter_rate(rng, 0.9, 0.1)
    return r


def nmap(rng):
    r = blank()
    proto, service, flag = [("tcp", "private", "SH"), ("udp", "private", "SF"), ("icmp", "eco_i", "SF")][rng.integers(3)]
    r.update(protocol_type=proto, service=service, flag=flag)
    r["count"] = r["srv_count"] = 1
    r["srv_diff_host_rate"] = 1.0
    r["dst_host_count"] = int(rng.integers(1, 40))
    r["dst_host_srv_count"] = int(rng.integers(1, 10))
    r["dst_host_same_src_port_rate"] = 1.0
    r["dst_host_serror_rate"] = jitter_rate(rng, 0.5, 0.3)
    return r


def guess_passwd(rng):
    r = blank()
    r.update(protocol_type="tcp", service="telnet", flag=["RSTO", "SF"][rng.integers(2)])
    r["duration"] = int(rng.integers(1, 6))
    r["src_bytes"] = 125
    r["dst_bytes"] = 179
    r["num_failed_logins"] = 1
    r["hot"] = 1
    r["count"] = r["srv_count"] = 1
    r["dst_host_count"] = int(rng.integers(1, 10))
    r["dst_host_srv_count"] = int(rng.integers(1, 10))
    r["dst_host_rerror_rate"] = jitter_rate(rng, 0.5, 0.3)
    return r


def warezclient(rng):
    r = normal(rng)
    r.update(protocol_type="tcp", service=["ftp_data", "ftp"][rng.integers(2)], flag="SF")
    r["duration"] = int(rng.integers(10, 2000))
    r["src_bytes"] = int(rng.lognormal(8.5, 1.0))
    r["dst_bytes"] = 0
    r["hot"] = int(rng.integers(2, 30))
    r["is_guest_login"] = 1
    return r


def buffer_overflow(rng):
    r = blank()
    r.update(protocol_type="tcp", service="telnet", flag="SF")
    r["duration"] = int(rng.integers(100, 400))
    r["src_bytes"] = int(rng.lognormal(7.0, 0.5))
    r["dst_bytes"] = int(rng.lognormal(8.5, 0.5))
    r["hot"] = int(rng.integers(1, 4))
    r["logged_in"] = 1
    r["root_shell"] = 1
    r["num_file_creations"] = 1
    r["count"] = r["srv_count"] = 1
    r["dst_host_count"] = int(rng.integers(1, 10))
    r["dst_host_srv_count"] = int(rng.integers(1, 10))
    return r


def mailbomb(rng):
    r = normal(rng)
    r.update(protocol_type="tcp", service="smtp", flag="SF")
    r["src_bytes"] = 1270
    r["dst_bytes"] = 331
    r["count"] = r["srv_count"] = int(rng.integers(100, 300))
    return r


def unknown_service(rng):
    r = normal(rng)
    r.update(protocol_type="udp", service="tftp_u", flag="SF")
    return r


GENERATORS = {
    "normal": normal, "neptune": neptune, "smurf": smurf, "back": back,
    "teardrop": teardrop, "pod": pod, "land": land, "satan": satan,
    "ipsweep": ipsweep, "portsweep": portsweep, "nmap": nmap,
    "guess_passwd": guess_passwd, "warezclient": warezclient,
    "buffer_overflow": buffer_overflow, "mailbomb": mailbomb,
    "processtable": neptune, "snmpgetattack": unknown_service,
}

# counts per label; proportions follow the training file's category mix
TRAIN_MIX = {
    "normal": 535, "neptune": 262, "smurf": 40, "back": 25, "teardrop": 20,
    "pod": 10, "land": 2, "satan": 26, "ipsweep": 25, "portsweep": 22,
    "nmap": 19, "guess_passwd": 4, "warezclient": 8, "buffer_overflow": 2,
}
STREAM_MIX = {
    "normal": 120, "neptune": 40, "smurf": 8, "satan": 6, "ipsweep": 6,
    "portsweep": 6, "mailbomb": 6, "processtable": 4, "snmpgetattack": 4,
}


def fmt(name, value):
    if name in RATE_FIELDS:
        return f"{value:.2f}"
    return str(value)


def render(label, rec, difficulty):
    fields = [fmt(n, rec[n]) for n in FEATURE_NAMES]
    return ",".join(fields + [label, str(difficulty)])


def generate(mix, seed):
    rng = np.random.default_rng(seed)
    labels = [lab for lab, n in mix.items() for _ in range(n)]
    labels = [labels[i] for i in rng.permutation(len(labels))]
    return [render(lab, GENERATORS[lab](rng), int(rng.integers(15, 22))) for lab in labels]


def scaled_mix(n):
    total = sum(TRAIN_MIX.values())
    mix = {lab: max(1, round(c * n / total)) for lab, c in TRAIN_MIX.items()}
    mix["normal"] += n - sum(mix.values())
    return mix


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--records", type=int, help="write one training-mix file with this many records")
    parser.add_argument("--out", help="output path for --records")
    parser.add_argument("--seed", type=int, default=7, help="generator seed for --records (default 7)")
    args = parser.parse_args()
    if args.records:
        if not args.out:
            parser.error("--records needs --out")
        lines = generate(scaled_mix(args.records), args.seed)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {len(lines)} lines to {args.out}")
        return
    os.makedirs(OUT, exist_ok=True)
    for name, mix, seed in (("nslkdd_fixture.txt", TRAIN_MIX, 20240501), ("nslkdd_stream.txt", STREAM_MIX, 20240502)):
        lines = generate(mix, seed)
        with open(os.path.join(OUT, name), "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {len(lines)} lines to {name}")


if __name__ == "__main__":
    main()
