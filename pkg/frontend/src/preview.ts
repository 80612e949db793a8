import * as THREE from 'three';

import { parseObjText } from './obj';

export interface PreviewHandle {
  showObj(objText: string, label: string): void;
  dispose(): void;
}

export type PreviewFactory = (container: HTMLElement) => PreviewHandle;

/**
 * Side preview of one generated asset (always the low LOD). Slowly spins
 * the mesh; the camera frames whatever bounding sphere the asset has.
 */
export function createPreview(container: HTMLElement): PreviewHandle {
  const width = container.clientWidth || 320;
  const height = container.clientHeight || 240;

  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setSize(width, height);
  container.appendChild(renderer.domElement);

  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0x1c1f26);
  scene.add(new THREE.AmbientLight(0xffffff, 0.6));
  const sun = new THREE.DirectionalLight(0xffffff, 1.2);
  sun.position.set(3, 5, 4);
  scene.add(sun);

  const camera = new THREE.PerspectiveCamera(40, width / height, 0.01, 100);
  let mesh: THREE.Mesh | null = null;
  let frame = 0;

  const animate = () => {
    frame = requestAnimationFrame(animate);
    if (mesh) {
      mesh.rotation.y += 0.01;
    }
    renderer.render(scene, camera);
  };
  animate();

  return {
    showObj(objText: string) {
      if (mesh) {
        scene.remove(mesh);
        mesh.geometry.dispose();
        (mesh.material as THREE.Material).dispose();
      }
      const parsed = parseObjText(objText);
      const geometry = new THREE.BufferGeometry();
      geometry.setAttribute('position', new THREE.BufferAttribute(parsed.positions, 3));
      geometry.setIndex(new THREE.BufferAttribute(parsed.index, 1));
      geometry.computeVertexNormals();
      geometry.computeBoundingSphere();

      const material = new THREE.MeshStandardMaterial({
        color: 0x9dbb6c,
        roughness: 0.8,
      });
      mesh = new THREE.Mesh(geometry, material);
      scene.add(mesh);

      const sphere = geometry.boundingSphere;
      const radius = sphere ? Math.max(sphere.radius, 0.01) : 1;
      const center = sphere ? sphere.center : new THREE.Vector3();
      camera.position.set(center.x + radius * 2.2, center.y + radius * 1.4, center.z + radius * 2.2);
      camera.lookAt(center);
    },
    dispose() {
      cancelAnimationFrame(frame);
      renderer.dispose();
      renderer.domElement.remove();
    },
  };
}
