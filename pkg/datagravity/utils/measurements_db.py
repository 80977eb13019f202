from typing import Any, Dict, List

# Published energy figures, picojoules. Ranges are (min, max) tuples.
MEASUREMENTS: Dict[str, Dict[str, Any]] = {
    "horowitz_fp_op": {
        "source": "Horowitz 2014",
        "node": "45 nm, 0.9 V",
        "e_compute_pj": (0.4, 3.7),
        "notes": "Floating-point operation energy across operation types and precisions.",
    },
    "horowitz_fp32": {
        "source": "Horowitz 2014",
        "node": "45 nm, 0.9 V",
        "e_compute_pj": 3.7,
        "notes": "FP32 operation.",
    },
    "horowitz_int32": {
        "source": "Horowitz 2014",
        "node": "45 nm, 0.9 V",
        "e_compute_pj": 0.1,
        "notes": "Int32 operation.",
    },
    "horowitz_cache": {
        "source": "Horowitz 2014",
        "node": "45 nm, 0.9 V",
        "e_move_pj": (10.0, 100.0),
        "e_compute_pj": 4.0,
        "access_width": 64,
        "notes": "Cache access by cache size, against the maximum operation energy (about 4 pJ).",
    },
    "horowitz_offchip": {
        "source": "Horowitz 2014",
        "node": "45 nm, 0.9 V",
        "e_move_pj": (1300.0, 2600.0),
        "e_compute_pj": 4.0,
        "access_width": 64,
        "notes": "Off-chip 64-bit DRAM access, against the maximum operation energy (about 4 pJ).",
    },
    "tpuv4i_int32": {
        "source": "Jouppi 2021 (TPUv4i)",
        "node": "7 nm",
        "e_compute_pj": 0.03,
        "notes": "Int32 operation.",
    },
    "tpuv4i_fp32": {
        "source": "Jouppi 2021 (TPUv4i)",
        "node": "7 nm",
        "e_compute_pj": 1.31,
        "notes": "FP32 operation.",
    },
    "tpuv4i_ddr": {
        "source": "Jouppi 2021 (TPUv4i)",
        "node": "7 nm",
        "e_move_pj": 1300.0,
        "e_compute_pj": 1.31,
        "access_width": 64,
        "notes": "DDR3/4 access, unchanged from 45 nm.",
    },
    "ddr5": {
        "source": "DDR5 main memory",
        "node": "7 nm logic, DDR5 at 1.1 V",
        "e_move_pj": 1300.0,
        "e_compute_pj": 1.31,
        "access_width": 64,
        "source_asserted": True,
        "notes": "Asserted figure (about 20% below DDR4 power, still about 1300 pJ per 64-bit access); no primary vendor measurement.",
    },
    "gddr6": {
        "source": "Jouppi 2021 (TPUv4i)",
        "node": "7 nm",
        "e_move_pj": (350.0, 480.0),
        "e_compute_pj": 1.31,
        "access_width": 64,
        "notes": "GDDR6 access against FP32 compute.",
    },
    "hbm": {
        "source": "Jouppi 2021 (TPUv4i)",
        "node": "7 nm",
        "e_move_pj": (250.0, 450.0),
        "e_compute_pj": 1.31,
        "access_width": 64,
        "notes": "HBM access against FP32 compute.",
    },
    "upmem_conventional": {
        "source": "Devaux 2019 (UPMEM)",
        "node": "conventional server",
        "e_move_pj": 3000.0,
        "e_compute_pj": 10.0,
        "access_width": 64,
        "notes": "64-bit operand operation on a conventional server: 3000 pJ movement + 10 pJ compute.",
    },
    "upmem_pim": {
        "source": "Devaux 2019 (UPMEM)",
        "node": "PIM-DRAM",
        "e_move_pj": 150.0,
        "e_compute_pj": 20.0,
        "access_width": 64,
        "notes": (
            "64-bit operand operation in PIM-DRAM: 150 pJ movement + 20 pJ compute. "
            "Independent evaluation (Falevoz 2024) found 11-20% savings on some database "
            "operations and 58% more energy on others; no breakdown to derive from."
        ),
    },
    "brain": {
        "source": "Harris 2012 / NIST 2023",
        "node": "biological",
        "power_w": 20.0,
        "op_rate": 1e18,
        "qualitative": True,
        "notes": "About 20 W at about 1e18 operations per second; non-digital, qualitative only.",
    },
}


CLAIMS: List[Dict[str, Any]] = [
    {
        "label": "DDR5 main memory G_d",
        "kind": "gd",
        "record_keys": ["ddr5"],
        "expected": 992.0,
        "quote": "G_d = 1300/1.31 ≈ 992",
    },
    {
        "label": "UPMEM PIM G_d",
        "kind": "gd",
        "record_keys": ["upmem_pim"],
        "expected": 7.5,
        "quote": "G_d = 150/20 = 7.5",
    },
    {
        "label": "Horowitz off-chip DRAM G_d",
        "kind": "gd",
        "record_keys": ["horowitz_offchip"],
        "expected": (325.0, 650.0),
        "quote": "G_d ≈ 325–650 for off-chip DRAM access",
    },
    {
        "label": "Horowitz cache G_d",
        "kind": "gd",
        "record_keys": ["horowitz_cache"],
        "expected": (2.5, 25.0),
        "quote": "G_d ≈ 2.5–25 for cache access",
    },
    {
        "label": "GDDR6/HBM G_d",
        "kind": "gd",
        "record_keys": ["gddr6", "hbm"],
        "expected": (190.0, 366.0),
        "quote": "yield G_d ≈ 190–366",
    },
    {
        "label": "Brain energy per operation",
        "kind": "energy_per_op",
        "record_keys": ["brain"],
        "expected": 2e-17,
        "quote": "~0.02 fJ per operation",
    },
    {
        "label": "Brain G_d below 1",
        "kind": "note",
        "record_keys": ["brain"],
        "informative": True,
        "quote": "suggests G_d < 1 for biological systems",
        "notes": "Neural operations are not digital operations; no G_d is derived.",
    },
    {
        "label": "UPMEM end-to-end efficiency",
        "kind": "ratio",
        "record_keys": ["upmem_conventional", "upmem_pim"],
        "quantity": "total",
        "expected": 20.0,
        "informative": True,
        "quote": "20× power efficiency gains",
        "notes": "3010 pJ / 170 pJ falls about 12% short of the vendor figure.",
    },
    {
        "label": "FP32 logic improvement 45 nm to 7 nm",
        "kind": "ratio",
        "record_keys": ["horowitz_fp32", "tpuv4i_fp32"],
        "quantity": "compute",
        "expected": 3.0,
        "informative": True,
        "quote": "logic energy improved 3-fold",
    },
    {
        "label": "Int32 logic improvement 45 nm to 7 nm",
        "kind": "ratio",
        "record_keys": ["horowitz_int32", "tpuv4i_int32"],
        "quantity": "compute",
        "expected": 3.0,
        "informative": True,
        "quote": "logic energy improved 3-fold",
    },
    {
        "label": "Modern memory G_d band",
        "kind": "gd",
        "record_keys": ["ddr5", "gddr6", "hbm"],
        "expected": (200.0, 1000.0),
        "informative": True,
        "quote": "G_d values now range from 200 to 1000 in modern systems",
    },
    {
        "label": "UPMEM independent evaluation",
        "kind": "note",
        "record_keys": ["upmem_pim"],
        "informative": True,
        "quote": "energy increases of 58% for others",
        "notes": "Savings of 11-20% on some database operations, 58% more energy on others.",
    },
]
