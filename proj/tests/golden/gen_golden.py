"""Reference codec written directly in numpy; produces the golden files
consumed by the CLI codec round-trip test.

    python3 tests/golden/gen_golden.py
"""

import json
import math
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent

AVG_BITS, AVG_MIN, AVG_MAX = 8, 10.0, 53.75
DELTA_BITS, DELTA_MIN, DELTA_MAX = 4, -8, 7
OFFSET_STEP = 0.25

CASES = {
    "a": dict(k=3, m=2, subcarriers=6, seed=20240611, b_phi=7, b_psi=9, n_g=1, noise=1.0, ref=1000.0),
    "b": dict(k=3, m=2, subcarriers=9, seed=77, b_phi=5, b_psi=7, n_g=4, noise=0.5, ref=1.0e5),
    "c": dict(k=2, m=2, subcarriers=3, seed=5, b_phi=4, b_psi=6, n_g=2, noise=1.0, ref=300.0),
}


def draw_channels(rng, k, m, subcarriers):
    scale = math.sqrt(0.5)
    return [
        [[scale * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) for _ in range(k)] for _ in range(k)]
        for _ in range(subcarriers)
    ]


def reported_indices(n, n_g):
    out = list(range(0, n, n_g))
    if out[-1] != n - 1:
        out.append(n - 1)
    return out


def canonical(h, k):
    m = h.shape[0]
    _, lam, vh = np.linalg.svd(h, full_matrices=False)
    f = vh.conj().T
    for j in range(f.shape[1]):
        tail = f[-1, j]
        f[:, j] *= np.conj(tail) / abs(tail)
    for blk in range(k - 1):
        lead = f[blk * m, 0]
        f[blk * m:(blk + 1) * m, :] *= np.conj(lead) / abs(lead)
    return lam, f


def givens_angles(f):
    v = f.copy()
    rows, cols = v.shape
    phis, psis = [], []
    for i in range(min(cols, rows - 1)):
        for r in range(i, rows - 1):
            phi = np.angle(v[r, i]) % (2 * np.pi)
            phis.append(phi)
            v[r, :] *= np.exp(-1j * phi)
        for row in range(i + 1, rows):
            psi = min(max(math.atan2(v[row, i].real, v[i, i].real), 0.0), np.pi / 2)
            psis.append(psi)
            c, s = math.cos(psi), math.sin(psi)
            top, bottom = v[i, :].copy(), v[row, :].copy()
            v[i, :] = c * top + s * bottom
            v[row, :] = -s * top + c * bottom
    return phis, psis


def rebuild(phis, psis, rows, cols):
    # apply the inverse steps in reverse order
    v = np.eye(rows, cols, dtype=complex)
    steps = []
    p = 0
    for i in range(min(cols, rows - 1)):
        col_phi = phis[p:p + rows - 1 - i]
        col_psi = psis[p:p + rows - 1 - i]
        steps.append((i, col_phi, col_psi))
        p += rows - 1 - i
    for i, col_phi, col_psi in reversed(steps):
        for row in range(rows - 1, i, -1):
            psi = col_psi[row - i - 1]
            c, s = math.cos(psi), math.sin(psi)
            top, bottom = v[i, :].copy(), v[row, :].copy()
            v[i, :] = c * top - s * bottom
            v[row, :] = s * top + c * bottom
        for r in range(i, rows - 1):
            v[r, :] *= np.exp(1j * col_phi[r - i])
    return v


def q_phi(a, b):
    levels = 1 << b
    return int(round(a / (2 * np.pi / levels))) % levels


def dq_phi(c, b):
    return c * (2 * np.pi / (1 << b))


def q_psi(a, b):
    top = (1 << b) - 1
    return min(max(int(round(a / ((np.pi / 2) / top))), 0), top)


def dq_psi(c, b):
    top = (1 << b) - 1
    return np.pi / 2 if c == top else c * ((np.pi / 2) / top)


def snr_codes(profile):
    prof = np.asarray(profile)
    avg = prof.mean(axis=0)
    offset = 0.0
    if avg.max() > AVG_MAX:
        offset = min(math.ceil((avg.max() - AVG_MAX) / OFFSET_STEP - 1e-9) * OFFSET_STEP, 255 * OFFSET_STEP)
    step = (AVG_MAX - AVG_MIN) / ((1 << AVG_BITS) - 1)
    avg_codes = [min(max(int(round((a - offset - AVG_MIN) / step)), 0), 255) for a in avg]
    avg_rec = [AVG_MIN + c * step for c in avg_codes]
    deltas = [
        [min(max(int(round(row[i] - offset - avg_rec[i])), DELTA_MIN), DELTA_MAX) - DELTA_MIN for i in range(len(avg))]
        for row in prof
    ]
    return avg_codes, deltas, offset


def snr_values(avg_codes, deltas, offset):
    step = (AVG_MAX - AVG_MIN) / ((1 << AVG_BITS) - 1)
    return [[AVG_MIN + avg_codes[i] * step + (d[i] + DELTA_MIN) + offset for i in range(len(avg_codes))] for d in deltas]


def pack(fields):
    bits = "".join(format(v, f"0{w}b") for v, w in fields)
    for v, w in fields:
        assert 0 <= v < (1 << w)
    padded = bits + "0" * (-len(bits) % 8)
    return bytes(int(padded[i:i + 8], 2) for i in range(0, len(padded), 8)).hex(), len(bits)


def encode_user(chan, user, case):
    k, m = case["k"], case["m"]
    reported = reported_indices(case["subcarriers"], case["n_g"])
    skip = {blk * m for blk in range(k - 1)}
    angle_codes, profile = [], []
    for s in reported:
        h = np.hstack([chan[s][user][l] for l in range(k)])
        lam, f = canonical(h, k)
        phis, psis = givens_angles(f)
        phi_codes = [q_phi(a, case["b_phi"]) for i, a in enumerate(phis) if i not in skip]
        psi_codes = [q_psi(a, case["b_psi"]) for a in psis]
        angle_codes.append((phi_codes, psi_codes))
        profile.append([10 * math.log10(x * x * case["ref"] / case["noise"]) for x in lam])
    avg_codes, deltas, offset = snr_codes(profile)

    fields = [(k, 4), (m, 3), (case["n_g"], 6), (case["b_phi"], 4), (case["b_psi"], 4), (int(round(offset / OFFSET_STEP)), 8)]
    for phi_codes, psi_codes in angle_codes:
        fields += [(c, case["b_phi"]) for c in phi_codes]
        fields += [(c, case["b_psi"]) for c in psi_codes]
    fields += [(c, AVG_BITS) for c in avg_codes]
    for row in deltas:
        fields += [(c, DELTA_BITS) for c in row]
    payload, nbits = pack(fields)

    # decoder side
    rows = k * m
    snr = snr_values(avg_codes, deltas, offset)
    effective = []
    for r, (phi_codes, psi_codes) in enumerate(angle_codes):
        it = iter(phi_codes)
        phis = [0.0 if i in skip else dq_phi(next(it), case["b_phi"]) for i in range(len(psi_codes))]
        psis = [dq_psi(c, case["b_psi"]) for c in psi_codes]
        f_hat = rebuild(phis, psis, rows, m)
        lam_hat = np.sqrt(np.power(10.0, np.asarray(snr[r]) / 10.0) * case["noise"] / case["ref"])
        effective.append(np.diag(lam_hat) @ f_hat.conj().T)
    return payload, nbits, reported, snr, effective


def matrix_json(a):
    return [[float(z.real), float(z.imag)] for z in a.reshape(-1)]


def main():
    for name, case in CASES.items():
        rng = np.random.default_rng(case["seed"])
        chan = draw_channels(rng, case["k"], case["m"], case["subcarriers"])
        channel_doc = {
            "k": case["k"],
            "m": case["m"],
            "subcarriers": case["subcarriers"],
            "seed": case["seed"],
            "h": [matrix_json(chan[s][a][b]) for s in range(case["subcarriers"]) for a in range(case["k"]) for b in range(case["k"])],
        }
        encoded, decoded = [], []
        for user in range(case["k"]):
            payload, nbits, reported, snr, eff = encode_user(chan, user, case)
            encoded.append({"user": user, "bit_length": nbits, "payload": payload})
            decoded.append({"user": user, "reported": reported, "snr_db": snr, "h": [matrix_json(e) for e in eff]})
        args = f"--bphi {case['b_phi']} --bpsi {case['b_psi']} --ng {case['n_g']} --noise {case['noise']} --ref-power {case['ref']}"
        (HERE / f"channels_{name}.json").write_text(json.dumps(channel_doc, indent=1) + "\n")
        (HERE / f"encoded_{name}.json").write_text(json.dumps({"args": args, "users": encoded}, indent=1) + "\n")
        (HERE / f"reconstruction_{name}.json").write_text(json.dumps({"users": decoded}, indent=1) + "\n")
        print(name, [e["bit_length"] for e in encoded])


if __name__ == "__main__":
    main()
