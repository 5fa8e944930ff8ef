use walt::term::Term;
use walt::reduction::reduce_to_nf;
use walt::tm::machine::*;
fn main() {
    let m = walt::tm::types::bit_flip();
    let lst = tape_list(&m, &[2, 1]).unwrap();
    let d = l2c_tm(&m).unwrap();
    let t = Term::app(d.subject().clone(), lst.subject().clone());
    let (got, tr) = reduce_to_nf(&t, 400_000).unwrap();
    println!("l2c result ({} steps): {}", tr.len(), got);
    println!("decode: {:?}", decode_config(&m, &got));
}
