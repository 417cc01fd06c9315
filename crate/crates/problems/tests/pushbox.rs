use advt_core::{Observation, PomdpModel};
use advt_problems::config::parse;
use advt_problems::pushbox::{detour_length, PushboxConfig, PushboxState, Status};
use advt_problems::{config_text, Pushbox, TERMINAL_OBSERVATION};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shipped(name: &str) -> PushboxConfig {
    parse(&config_text(name, None).unwrap()).unwrap()
}

fn noiseless() -> Pushbox<2> {
    let mut c = shipped("pushbox2d.toml");
    c.robot_noise = 0.0;
    c.push_noise = 0.0;
    c.puck_noise = 0.0;
    c.bearing_noise = 0.0;
    Pushbox::new(c).unwrap()
}

fn state(robot: [f64; 2], puck: [f64; 2]) -> PushboxState<2> {
    PushboxState {
        robot,
        puck,
        status: Status::Running,
    }
}

#[test]
fn free_motion_without_noise() {
    let m = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let s = state([2.0, 5.0], [5.0, 8.0]);
    let step = m.step(&s, &[0.5, -0.25], &mut rng);
    assert_eq!(step.next_state.robot, [2.5, 4.75]);
    assert_eq!(step.next_state.puck, s.puck);
    assert_eq!(step.reward, 0.0);
    assert!(!m.is_terminal(&step.next_state));
}

#[test]
fn pushing_into_goal_pays_goal_reward() {
    let m = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    // Touching the puck from behind; a full push moves it 1.5 to x = 7.5,
    // inside the goal disk around (8, 5).
    let s = state([5.0, 5.0], [6.0, 5.0]);
    let step = m.step(&s, &[1.0, 0.0], &mut rng);
    assert!((step.next_state.puck[0] - 7.5).abs() < 1e-12);
    assert_eq!(step.next_state.robot, [5.0, 5.0]);
    assert_eq!(step.reward, 1000.0);
    assert_eq!(step.observation, Observation::Discrete(TERMINAL_OBSERVATION));
    assert!(m.is_terminal(&step.next_state));
    assert!(m.is_success(&step.next_state));
}

#[test]
fn leaving_the_arena_pays_collision_penalty() {
    let m = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = state([0.8, 5.0], [5.0, 5.0]);
    let step = m.step(&s, &[-1.0, 0.0], &mut rng);
    assert_eq!(step.reward, -500.0);
    assert!(m.is_terminal(&step.next_state));
    assert!(!m.is_success(&step.next_state));
}

#[test]
fn robot_stops_at_first_contact() {
    let m = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = state([3.5, 5.0], [5.0, 5.0]);
    let step = m.step(&s, &[1.0, 0.0], &mut rng);
    // Contact after 0.5; the remaining 0.5 pushes the puck by 0.75.
    assert!((step.next_state.robot[0] - 4.0).abs() < 1e-12);
    assert!((step.next_state.puck[0] - 5.75).abs() < 1e-12);
    // Puck straight ahead sits on the sector boundary at angle 0; contact
    // adds the sector count.
    assert_eq!(step.observation, Observation::Discrete(12));
}

#[test]
fn bearing_sectors_without_contact() {
    let m = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // Puck at 45 degrees: sector 1 of 12 (30 degrees each).
    let o = m.observation_key(&[2.0, 2.0], &[4.0, 4.0], false, &mut rng);
    assert_eq!(o, 1);
    // Puck at 200 degrees: sector 6.
    let a = 200f64.to_radians();
    let o = m.observation_key(&[5.0, 5.0], &[5.0 + a.cos(), 5.0 + a.sin()], false, &mut rng);
    assert_eq!(o, 6);
}

#[test]
fn three_dimensional_observation_encodes_elevation() {
    let mut c = shipped("pushbox3d.toml");
    c.bearing_noise = 0.0;
    let m = Pushbox::<3>::new(c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // Straight up: elevation π/2 falls in the top band (5 of 6).
    let o = m.observation_key(&[5.0, 5.0, 2.0], &[5.0, 5.0, 6.0], false, &mut rng);
    assert_eq!(o, 12 * 5);
    let o = m.observation_key(&[5.0, 5.0, 2.0], &[5.0, 5.0, 6.0], true, &mut rng);
    assert_eq!(o, 12 * 5 + 72);
}

#[test]
fn heuristic_is_discounted_goal_reward() {
    let m = noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // Robot already behind the puck, puck 1.0 from the goal boundary:
    // 1/1.2 pushes at the heuristic speed.
    let s = state([5.25, 5.0], [6.25, 5.0]);
    let h = m.rollout_heuristic(&s, &mut rng).unwrap();
    assert!((h - 1000.0 * 0.95f64.powf((1.0 / 1.2 - 1.0f64).max(0.0))).abs() < 1e-9);
    // Robot on the goal side must walk half way round the puck: two
    // tangents of length zero and a half-circle arc of radius 1.
    let s = state([7.25, 5.0], [6.25, 5.0]);
    let h = m.rollout_heuristic(&s, &mut rng).unwrap();
    let steps = std::f64::consts::PI + 1.0 / 1.2 - 1.0;
    assert!((h - 1000.0 * 0.95f64.powf(steps)).abs() < 1e-9);
}

#[test]
fn detour_wraps_around_the_puck() {
    let r = 1.0;
    let d = detour_length(&[-2.0, 0.0], &[2.0, 0.0], &[0.0, 0.0], r);
    let expected = 2.0 * 3f64.sqrt() + std::f64::consts::PI / 3.0;
    assert!((d - expected).abs() < 1e-12);
    // A segment clearing the disk is taken straight.
    assert_eq!(detour_length(&[-2.0, 1.5], &[2.0, 1.5], &[0.0, 0.0], r), 4.0);
}

#[test]
fn initial_states_are_valid() {
    let m = Pushbox::<2>::new(shipped("pushbox2d.toml")).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..2000 {
        let s = m.sample_initial_state(&mut rng);
        assert_eq!(s.robot, [2.0, 5.0]);
        assert!(!m.is_terminal(&s));
        assert!(s.puck.iter().all(|&x| (0.5..=9.5).contains(&x)));
    }
}

proptest! {
    #[test]
    fn replaying_a_seed_is_bit_exact(seed in any::<u64>(), a in prop::array::uniform2(-1.0f64..1.0)) {
        let m = Pushbox::<2>::new(shipped("pushbox2d.toml")).unwrap();
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = m.sample_initial_state(&mut rng);
            let mut out = Vec::new();
            for _ in 0..10 {
                let step = m.step(&s, &a, &mut rng);
                out.push((step.observation, step.reward));
                s = step.next_state;
            }
            (s, out)
        };
        prop_assert_eq!(run(seed), run(seed));
    }

    #[test]
    fn rewards_are_terminal_constants(seed in any::<u64>(), a in prop::array::uniform2(-1.0f64..1.0)) {
        let m = Pushbox::<2>::new(shipped("pushbox2d.toml")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = m.sample_initial_state(&mut rng);
        for _ in 0..30 {
            if m.is_terminal(&s) {
                break;
            }
            let step = m.step(&s, &a, &mut rng);
            let r = step.reward;
            prop_assert!(r == 0.0 || r == 1000.0 || r == -500.0);
            prop_assert_eq!(r != 0.0, m.is_terminal(&step.next_state));
            prop_assert_eq!(r != 0.0, step.observation == Observation::Discrete(TERMINAL_OBSERVATION));
            if !m.is_terminal(&step.next_state) {
                prop_assert!(step.next_state.robot.iter().all(|&x| (0.5..=9.5).contains(&x)));
                prop_assert!(step.next_state.puck.iter().all(|&x| (0.5..=9.5).contains(&x)));
            }
            s = step.next_state;
        }
    }
}
