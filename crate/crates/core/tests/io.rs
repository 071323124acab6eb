use std::fs;

use lsqrank::io::{
    is_bin_file, load_bin, load_csv, load_matrix, read_bin, read_csv, save_bin, save_csv,
    write_bin, BinFile, BinReader,
};
use lsqrank::matrix::DenseMatrix;
use lsqrank::Error;
use proptest::prelude::*;

#[test]
fn two_by_two_binary_is_56_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d1.bin");
    let d1 = DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, 4.0]]).unwrap();
    save_bin(&path, &d1).unwrap();
    let bytes = fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 56);
    assert_eq!(&bytes[..4], b"LSQ1");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2);
    assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2);
    assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 3.0);
    assert_eq!(f64::from_le_bytes(bytes[48..56].try_into().unwrap()), 4.0);
    assert!(is_bin_file(&path).unwrap());
    assert_eq!(load_matrix(&path).unwrap(), d1);
}

#[test]
fn truncated_binary_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.bin");
    let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
    save_bin(&path, &a).unwrap();
    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(matches!(load_bin(&path), Err(Error::Format(_))));
    assert!(matches!(BinFile::open(&path), Err(Error::Format(_))));
    fs::write(&path, &bytes[..10]).unwrap();
    assert!(matches!(load_bin(&path), Err(Error::Format(_))));
}

#[test]
fn bad_header_is_rejected() {
    let mut buf = Vec::new();
    write_bin(&mut buf, &DenseMatrix::from_rows(&[[1.0]]).unwrap()).unwrap();
    let mut bad_magic = buf.clone();
    bad_magic[0] = b'X';
    assert!(matches!(read_bin(&bad_magic[..]), Err(Error::Format(_))));
    let mut bad_version = buf.clone();
    bad_version[4] = 2;
    assert!(matches!(read_bin(&bad_version[..]), Err(Error::Format(_))));
    let mut trailing = buf.clone();
    trailing.push(0);
    assert!(matches!(read_bin(&trailing[..]), Err(Error::Format(_))));
    let mut nan = buf;
    nan[24..32].copy_from_slice(&f64::NAN.to_le_bytes());
    assert!(read_bin(&nan[..]).is_err());
}

#[test]
fn csv_errors() {
    assert!(matches!(read_csv("1,2\n3\n".as_bytes()), Err(Error::Format(_))));
    assert!(matches!(read_csv("1,abc\n".as_bytes()), Err(Error::Format(_))));
    assert!(matches!(read_csv("1,inf\n".as_bytes()), Err(Error::Format(_))));
    assert!(matches!(read_csv("".as_bytes()), Err(Error::Format(_))));
    let a = read_csv("1, 2\n\n3,4\n".as_bytes()).unwrap();
    assert_eq!(a.as_slice(), &[1.0, 2.0, 3.0, 4.0]);
}

#[test]
fn reader_streams_rows() {
    let a = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
    let mut buf = Vec::new();
    write_bin(&mut buf, &a).unwrap();
    let reader = BinReader::new(&buf[..]).unwrap();
    assert_eq!((reader.nrows(), reader.ncols()), (2, 3));
    let rows: Vec<Vec<f64>> = reader.map(|r| r.unwrap()).collect();
    assert_eq!(rows, vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
}

fn any_matrix() -> impl Strategy<Value = DenseMatrix> {
    (1usize..8, 1usize..6).prop_flat_map(|(n, d)| {
        prop::collection::vec(
            prop_oneof![
                any::<f64>().prop_filter("finite", |x| x.is_finite()),
                -1e3f64..1e3,
                Just(0.0),
                Just(-0.0),
            ],
            n * d,
        )
        .prop_map(move |data| DenseMatrix::new(n, d, data).unwrap())
    })
}

fn bits(a: &DenseMatrix) -> Vec<u64> {
    a.as_slice().iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roundtrip_is_bitwise(a in any_matrix()) {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("a.csv");
        let bin = dir.path().join("a.bin");
        save_csv(&csv, &a).unwrap();
        save_bin(&bin, &a).unwrap();
        let from_csv = load_csv(&csv).unwrap();
        let from_bin = load_bin(&bin).unwrap();
        prop_assert_eq!((from_csv.nrows(), from_csv.ncols()), (a.nrows(), a.ncols()));
        prop_assert_eq!(bits(&from_csv), bits(&a));
        prop_assert_eq!(bits(&from_bin), bits(&a));
        prop_assert_eq!(
            fs::metadata(&bin).unwrap().len(),
            24 + 8 * (a.nrows() * a.ncols()) as u64
        );
    }
}
