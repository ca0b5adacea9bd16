//! Published per-subsystem confusion counts and the split sizes they refer to.

pub struct PublishedRow {
    pub cheat: &'static str,
    pub split: &'static str,
    pub system: &'static str,
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
    pub accuracy: f64,
    pub recall: f64,
    pub npv: f64,
    pub oei: f64,
}

/// Players per split.
pub fn split_size(cheat: &str, split: &str) -> u64 {
    match (cheat, split) {
        ("aimbot", "validation") => 8_561,
        ("aimbot", "test") => 9_047,
        ("wallhack", "validation") => 9_712,
        ("wallhack", "test") => 10_274,
        _ => panic!("unknown split {cheat}/{split}"),
    }
}

macro_rules! row {
    ($c:literal, $s:literal, $y:literal, $tp:expr, $tn:expr, $fp:expr, $fn_:expr, $a:expr, $r:expr, $n:expr, $o:expr) => {
        PublishedRow {
            cheat: $c,
            split: $s,
            system: $y,
            tp: $tp,
            tn: $tn,
            fp: $fp,
            fn_: $fn_,
            accuracy: $a,
            recall: $r,
            npv: $n,
            oei: $o,
        }
    };
}

pub const ROWS: [PublishedRow; 16] = [
    row!("aimbot", "validation", "revpov", 458, 4_796, 2_901, 406, 0.614, 0.530, 0.922, 1.246),
    row!("aimbot", "validation", "revstats", 453, 7_290, 407, 411, 0.904, 0.524, 0.947, 4.941),
    row!("aimbot", "validation", "exspc", 553, 6_187, 1_510, 311, 0.787, 0.640, 0.952, 2.529),
    row!("aimbot", "validation", "hawk", 614, 5_803, 1_894, 250, 0.750, 0.711, 0.959, 2.326),
    row!("aimbot", "test", "revpov", 481, 5_088, 3_075, 403, 0.616, 0.544, 0.927, 1.283),
    row!("aimbot", "test", "revstats", 566, 6_797, 1_366, 318, 0.814, 0.640, 0.955, 2.864),
    row!("aimbot", "test", "exspc", 558, 6_616, 1_547, 326, 0.793, 0.631, 0.953, 2.586),
    row!("aimbot", "test", "hawk", 642, 5_837, 2_326, 242, 0.716, 0.726, 0.960, 2.126),
    row!("wallhack", "validation", "revpov", 573, 6_081, 2_664, 394, 0.685, 0.593, 0.939, 1.670),
    row!("wallhack", "validation", "revstats", 604, 8_241, 504, 363, 0.911, 0.625, 0.958, 4.143),
    row!("wallhack", "validation", "exspc", 760, 7_258, 1_487, 207, 0.826, 0.786, 0.972, 3.303),
    row!("wallhack", "validation", "hawk", 798, 7_033, 1_712, 169, 0.806, 0.825, 0.977, 3.118),
    row!("wallhack", "test", "revpov", 627, 6_364, 2_885, 398, 0.680, 0.612, 0.941, 1.684),
    row!("wallhack", "test", "revstats", 855, 6_988, 2_261, 170, 0.763, 0.834, 0.976, 1.946),
    row!("wallhack", "test", "exspc", 501, 8_484, 765, 524, 0.875, 0.489, 0.942, 3.736),
    row!("wallhack", "test", "hawk", 869, 6_902, 2_347, 156, 0.756, 0.848, 0.978, 2.649),
];
