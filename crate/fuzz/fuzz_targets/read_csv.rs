#![no_main]

use joint_select::closed_form::RegionPoint;
use joint_select::experiment::{read_csv_rows, write_csv_rows, RumContourRow, SuccessRow};
use joint_select::mallows::PmfTable;
use libfuzzer_sys::fuzz_target;

fn round_trip<R>(data: &[u8])
where
    R: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug,
{
    if let Ok(rows) = read_csv_rows::<R, _>(data) {
        let mut buf = Vec::new();
        write_csv_rows(&rows, &mut buf).expect("rows serialize");
        let again: Vec<R> = read_csv_rows(buf.as_slice()).expect("own output parses");
        // NaN cells compare unequal, so only the length is checked in general.
        assert_eq!(again.len(), rows.len());
    }
}

fuzz_target!(|data: &[u8]| {
    round_trip::<RegionPoint>(data);
    round_trip::<SuccessRow>(data);
    round_trip::<RumContourRow>(data);
    let _ = PmfTable::read_csv_entries(data);
});
